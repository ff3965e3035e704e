#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fio/atoms.hpp"

using namespace fio;

TEST_CASE("ball volume") {
    CHECK(ball_volume(1, 2.0) == doctest::Approx(4.0));
    CHECK(ball_volume(2, 1.0) == doctest::Approx(std::numbers::pi));
    CHECK(ball_volume(3, 0.5) == doctest::Approx(4.0 / 3.0 * std::numbers::pi / 8.0));
}

TEST_CASE("atoms have mean zero, the right sup and support in the ball") {
    for (int n : {2, 3}) {
        Grid g(n, 2.0, n == 2 ? 256 : 64);
        for (const std::string prof : {"odd", "radial-diff"}) {
            for (double r : {1.0, 0.5}) {
                Vec c(n);
                c[0] = 0.25;
                Atom a = make_atom(c, r, prof, g);
                double mean = quadrature_integral(std::span<const double>(a.samples), g);
                double sup = lp_norm(std::span<const double>(a.samples), INFINITY, g).value;
                double l1 = lp_norm(std::span<const double>(a.samples), 1.0, g).value;
                CHECK(std::abs(mean) < 1e-12);
                CHECK(sup == doctest::Approx(1.0 / ball_volume(n, r)).epsilon(1e-12));
                CHECK(l1 <= 1.0 + 1e-12);
                CHECK(l1 > 0.05);
                for (std::size_t p = 0; p < g.size(); ++p)
                    if (norm(g.point(p) - c) >= r) CHECK(a.samples[p] == 0.0);
            }
        }
    }
}

TEST_CASE("atom errors") {
    Grid g(2, 2.0, 64);  // h = 1/16
    CHECK_THROWS_AS(make_atom(Vec{0.0, 0.0}, 0.2, "odd", g), std::invalid_argument);
    CHECK_THROWS_AS(make_atom(Vec{1.5, 0.0}, 0.5, "odd", g), std::invalid_argument);
    CHECK_THROWS_AS(make_atom(Vec{0.0, 0.0}, 0.5, "square", g), std::invalid_argument);
    CHECK_THROWS_AS(make_atom(Vec{0.0}, 0.5, "odd", g), std::invalid_argument);
    CHECK_NOTHROW(make_atom(Vec{0.0, 0.0}, 0.25, "odd", g));
}

TEST_CASE("lp norms") {
    Grid g(2, 1.0, 32);
    std::vector<double> one(g.size(), 1.0);
    for (double p : {1.0, 2.0, 3.5}) {
        NormReport r = lp_norm(std::span<const double>(one), p, g);
        CHECK(r.value == doctest::Approx(std::pow(4.0, 1.0 / p)));
        CHECK(r.points == g.size());
        CHECK(r.spacing == g.spacing());
    }
    std::vector<cplx> z(g.size(), cplx(0.0, -2.0));
    CHECK(lp_norm(std::span<const cplx>(z), INFINITY, g).value == 2.0);
    CHECK(lp_norm(std::span<const cplx>(z), 2.0, g).value == doctest::Approx(4.0));
    CHECK_THROWS_AS(lp_norm(std::span<const double>(one), 0.5, g), std::invalid_argument);
    CHECK_THROWS_AS(lp_norm(std::span<const double>(one.data(), 3), 2.0, g), std::invalid_argument);
}

TEST_CASE("random band functions") {
    Grid g(2, 4.0, 128);
    auto f = random_band_function(g, 0.5, 4.0, 3);
    CHECK(lp_norm(std::span<const double>(f), 2.0, g).value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f == random_band_function(g, 0.5, 4.0, 3));
    CHECK(f != random_band_function(g, 0.5, 4.0, 4));
    // taking the real part keeps the annulus (it is symmetric under xi -> -xi)
    std::vector<cplx> fc(f.begin(), f.end());
    auto F = dft(fc, g);
    Grid dual = g.dual();
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
        double rad = norm(dual.point(k));
        (rad >= 0.5 - 1e-12 && rad <= 4.0 + 1e-12 ? in : out) += std::norm(F[k]);
    }
    CHECK(out <= 1e-24 * in);
    CHECK_THROWS_AS(random_band_function(g, 4.0, 0.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_band_function(g, 1.0, 100.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_band_function(g, 0.001, 0.002, 1), std::invalid_argument);
}
