#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fio/numerics.hpp"

using namespace fio;

namespace {
std::vector<cplx> sample(const Grid& g, const std::function<cplx(const Vec&)>& f) {
    std::vector<cplx> out(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) out[p] = f(g.point(p));
    return out;
}

// composite Simpson in long double, independent of the grid code
long double simpson(const std::function<long double(long double)>& f, long double a, long double b, int n) {
    long double h = (b - a) / n, s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0L : 2.0L);
    return s * h / 3.0L;
}
}  // namespace

TEST_CASE("grid layout and weights") {
    Grid g(2, 1.5, 8);
    CHECK(g.size() == 64);
    CHECK(g.spacing() == doctest::Approx(0.375));
    CHECK(g.weight() == doctest::Approx(0.375 * 0.375));
    for (std::size_t p = 0; p < g.size(); ++p) {
        Vec x = g.point(p);
        for (int a = 0; a < 2; ++a) {
            CHECK(x[a] >= -1.5);
            CHECK(x[a] < 1.5);
        }
        CHECK(g.flatten(g.unflatten(p)) == p);
    }
    CHECK_THROWS_AS(Grid(4, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(Grid(1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("multi-index rejects negatives") {
    CHECK(MultiIndex{1, 2}.order() == 3);
    CHECK_THROWS_AS((MultiIndex{1, -1}), std::invalid_argument);
    auto all = multi_indices_up_to(2, 2);
    CHECK(all.size() == 6);
    CHECK(all.front().order() == 0);
    CHECK(all.back().order() == 2);
}

TEST_CASE("quadrature examples") {
    Grid g(1, 1.0, 4);
    std::vector<cplx> ones(4, 1.0);
    CHECK(std::abs(quadrature_integral(ones, g) - cplx(2.0)) < 1e-15);

    Grid s(1, 1.0, 64);
    // x_i = -1 + i h is not symmetric; drop the lone endpoint -1 to keep the odd sum exact
    auto odd = sample(s, [](const Vec& x) { return x[0] == -1.0 ? 0.0 : x[0]; });
    CHECK(std::abs(quadrature_integral(odd, s)) < 1e-12);

    Grid gg(1, 8.0, 1024);
    auto gauss = sample(gg, [](const Vec& x) { return std::exp(-x[0] * x[0]); });
    long double oracle = simpson([](long double t) { return std::exp(-t * t); }, -8.0L, 8.0L, 200000);
    CHECK(std::abs(quadrature_integral(gauss, gg).real() - static_cast<double>(oracle)) < 1e-6);
    CHECK(std::abs(static_cast<double>(oracle) - std::sqrt(std::numbers::pi)) < 1e-9);

    std::vector<cplx> empty;
    CHECK_THROWS_AS(quadrature_integral(empty, Grid(1, 1.0, 1)), std::invalid_argument);
}

TEST_CASE("quadrature is linear") {
    Grid g(2, 2.0, 16);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    std::vector<cplx> f(g.size()), h(g.size()), c(g.size());
    cplx a(1.3, -0.2), b(-0.7, 2.1);
    for (std::size_t p = 0; p < g.size(); ++p) {
        f[p] = {n(rng), n(rng)};
        h[p] = {n(rng), n(rng)};
        c[p] = a * f[p] + b * h[p];
    }
    cplx lhs = quadrature_integral(c, g);
    cplx rhs = a * quadrature_integral(f, g) + b * quadrature_integral(h, g);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("dft of the self-dual gaussian") {
    Grid g(1, 8.0, 512);
    auto f = sample(g, [](const Vec& x) { return std::exp(-std::numbers::pi * x[0] * x[0]); });
    auto F = dft(f, g);
    Grid d = g.dual();
    double err = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k)
        err = std::max(err, std::abs(F[k] - std::exp(-std::numbers::pi * d.point(k)[0] * d.point(k)[0])));
    CHECK(err < 1e-6);
}

TEST_CASE("dft of a 2-D gaussian matches the closed form") {
    Grid g(2, 6.0, 64);
    auto f = sample(g, [](const Vec& x) { return std::exp(-std::numbers::pi * norm2(x)); });
    auto F = dft(f, g);
    Grid d = g.dual();
    double err = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) err = std::max(err, std::abs(F[k] - std::exp(-std::numbers::pi * norm2(d.point(k)))));
    CHECK(err < 1e-8);
}

TEST_CASE("dft modulus is shift invariant") {
    Grid g(1, 8.0, 256);
    auto bump = [](double t) { return std::exp(-16.0 * t * t); };
    auto f = sample(g, [&](const Vec& x) { return bump(x[0]); });
    auto fs = sample(g, [&](const Vec& x) { return bump(x[0] - 1.25); });
    auto F = dft(f, g), Fs = dft(fs, g);
    double err = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) err = std::max(err, std::abs(std::abs(F[k]) - std::abs(Fs[k])));
    CHECK(err < 1e-8);
}

TEST_CASE("dft round trip and Parseval") {
    for (int dim : {1, 2, 3}) {
        Grid g(dim, 3.0, dim == 3 ? 8 : 32);
        std::mt19937_64 rng(dim);
        std::normal_distribution<double> n;
        std::vector<cplx> f(g.size());
        for (auto& v : f) v = {n(rng), n(rng)};
        auto back = idft(dft(f, g), g);
        double num = 0, den = 0;
        for (std::size_t p = 0; p < f.size(); ++p) {
            num += std::norm(back[p] - f[p]);
            den += std::norm(f[p]);
        }
        CHECK(std::sqrt(num / den) < 1e-10);
        auto F = dft(f, g);
        double ex = 0, ef = 0;
        for (auto v : f) ex += std::norm(v);
        for (auto v : F) ef += std::norm(v);
        CHECK(std::abs(ex * g.weight() - ef * g.dual().weight()) / (ex * g.weight()) < 1e-8);
    }
    Grid bad(1, 1.0, 12);
    std::vector<cplx> f(12);
    CHECK_THROWS_AS(dft(f, bad), std::invalid_argument);
}

TEST_CASE("finite differences") {
    ScalarField sq = [](const Vec& x) { return x[0] * x[0]; };
    CHECK(finite_difference(sq, Vec{0.3, -2.0}, MultiIndex{2, 0}, 1e-2) == doctest::Approx(2.0).epsilon(1e-6));
    ScalarField nrm = [](const Vec& x) { return norm(x); };
    CHECK(std::abs(finite_difference(nrm, Vec{1.0, 0.0}, MultiIndex{1, 0}, 1e-3) - 1.0) < 1e-6);
    ScalarField sn = [](const Vec& x) { return std::sin(x[0]); };
    double h = 1e-2;
    CHECK(std::abs(finite_difference(sn, Vec{0.0}, MultiIndex{1}, h) - 1.0) < h * h);
    // cubic polynomial, mixed index of order <= 3 is exact up to rounding
    ScalarField poly = [](const Vec& x) { return 3 * x[0] * x[0] * x[1] - x[1] * x[1] * x[1] + 2 * x[0]; };
    Vec p{0.4, -0.7};
    CHECK(std::abs(finite_difference(poly, p, MultiIndex{2, 1}, 1e-2) - 6.0) < 1e-6);
    CHECK(std::abs(finite_difference(poly, p, MultiIndex{1, 1}, 1e-2) - 6.0 * p[0]) < 1e-6);
    CHECK(std::abs(finite_difference(poly, p, MultiIndex{0, 3}, 1e-2) + 6.0) < 1e-6);
    CHECK_THROWS_AS(finite_difference(sq, Vec{0.0, 0.0}, MultiIndex{1, 0}, 0.0), std::invalid_argument);
    CHECK(default_fd_step(Vec{0.0, 0.0}) == doctest::Approx(1e-3));
    CHECK(default_fd_step(Vec{300.0, 400.0}) == doctest::Approx(0.5));
}

TEST_CASE("log2 slope fits") {
    std::vector<std::pair<int, double>> a{{1, 0.5}, {2, 0.25}, {3, 0.125}};
    auto fa = fit_log2_slope(a);
    CHECK(std::abs(fa.slope + 1.0) < 1e-12);
    CHECK(fa.residual < 1e-10);
    std::vector<std::pair<int, double>> c{{1, 3.0}, {2, 3.0}, {5, 3.0}};
    CHECK(std::abs(fit_log2_slope(c).slope) < 1e-15);
    std::vector<std::pair<int, double>> h;
    for (int j = 2; j <= 6; ++j) h.emplace_back(j, std::pow(2.0, -0.5 * j));
    auto fh = fit_log2_slope(h);
    CHECK(std::abs(fh.slope + 0.5) < 1e-12);
    CHECK(fh.residual < 1e-10);
    std::vector<std::pair<int, double>> two{{1, 1.0}, {2, 1.0}};
    CHECK_THROWS_AS(fit_log2_slope(two), std::invalid_argument);
    std::vector<std::pair<int, double>> neg{{1, 1.0}, {2, 0.0}, {3, 1.0}};
    CHECK_THROWS_AS(fit_log2_slope(neg), std::invalid_argument);
}
