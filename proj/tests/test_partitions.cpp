#include <doctest.h>

#include <cmath>
#include <iostream>
#include <numbers>
#include <random>

#include "fio/numerics.hpp"
#include "fio/partitions.hpp"

using namespace fio;

namespace {
Vec random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return normalized(v);
}
}  // namespace

TEST_CASE("bump values") {
    CHECK(bump(0.5) == 1.0);
    CHECK(bump(-1.0) == 1.0);
    CHECK(bump(3.0) == 0.0);
    CHECK(bump(2.0) == 0.0);
    CHECK(std::abs(bump(1.5) - 0.5) < 1e-15);
    CHECK(std::abs(bump(-1.5) - 0.5) < 1e-15);
    double prev = 1.0;
    for (double t = 1.0; t <= 2.0; t += 0.01) {
        CHECK(bump(t) <= prev + 1e-15);
        prev = bump(t);
    }
}

TEST_CASE("eta is one at its direction and scale invariant") {
    std::mt19937_64 rng(1);
    for (int n : {2, 3}) {
        DirectionNet net = build_direction_net(5, n);
        for (const auto& d : net.directions()) {
            CHECK(eta_eval(d, d.vector) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(eta_eval(d, d.vector * 37.0) == doctest::Approx(1.0).epsilon(1e-14));
        }
        for (int t = 0; t < 200; ++t) {
            Vec u = random_unit(rng, n);
            const auto& d = net[t % net.size()];
            CHECK(eta_eval(d, u) == doctest::Approx(eta_eval(d, u * 1000.0)).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(eta_eval(Direction{Vec{1.0, 0.0}, 0, 2U}, Vec{0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("cone partition sums to one and is homogeneous") {
    std::mt19937_64 rng(2);
    for (auto [n, j] : {std::pair{2, 4}, std::pair{2, 7}, std::pair{3, 5}}) {
        DirectionNet net = build_direction_net(j, n);
        for (int t = 0; t < 300; ++t) {
            Vec xi = random_unit(rng, n) * std::ldexp(1.0, j);
            double s = 0.0;
            for (std::size_t v = 0; v < net.size(); ++v) {
                if (eta_eval(net[v], xi) == 0.0) continue;  // chi_eval is full cost per call
                double c = chi_eval(net, v, xi);
                CHECK(c >= 0.0);
                if (c > 0.0) {
                    CHECK(in_cone(net[v], xi));
                    CHECK(chi_eval(net, v, xi * 0.125) == doctest::Approx(c).epsilon(1e-12));
                }
                s += c;
            }
            CHECK(std::abs(s - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("uncovered directions raise a coverage error") {
    // one direction cannot cover the circle
    DirectionNet lonely(4, 2, {Direction{Vec{1.0, 0.0}, 4, 2U}});
    CHECK_THROWS_AS(chi_eval(lonely, 0, Vec{0.0, 1.0}), NetCoverageError);
    CHECK(chi_eval(lonely, 0, Vec{3.0, 0.0}) == 1.0);
}

TEST_CASE("radial partition") {
    CHECK(radial_eval(0, Vec{0.0, 0.0}) == 1.0);
    CHECK(radial_eval(0, Vec{2.0, 0.0}) == 0.0);
    CHECK(radial_eval(3, Vec{0.0, 0.0}) == 0.0);
    CHECK(radial_eval(3, Vec{8.0, 0.0}) == 1.0);  // phi(1) - phi(4)
    CHECK(radial_eval(3, Vec{0.0, 100.0}) == 0.0);
    CHECK_THROWS_AS(radial_eval(-1, Vec{1.0, 1.0}), std::invalid_argument);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 300.0);
    for (int t = 0; t < 500; ++t) {
        Vec xi = random_unit(rng, 3) * u(rng);
        double s = 0.0;
        for (int j = 0; j <= 10; ++j) {
            double r = radial_eval(j, xi);
            CHECK(r >= 0.0);
            CHECK(r <= 1.0);
            s += r;
        }
        // telescoping: total is phi(4^{-10} |xi|^2) = 1 for |xi| < 2^10
        CHECK(std::abs(s - 1.0) < 1e-13);
    }
}

TEST_CASE("coordinate partition delta_ell") {
    const int j = 5;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-64.0, 64.0);
    auto ells = all_ells(j, 2);
    CHECK(ells.size() == 36);
    for (int t = 0; t < 300; ++t) {
        Vec xi{u(rng), u(rng)};
        double s = 0.0;
        for (const auto& e : ells) s += delta_eval(j, e, xi);
        CHECK(std::abs(s - 1.0) < 1e-13);
    }
    // phi_{l,j} peaks at |t| = 2^{j-l+1} for l < j; l = j is the inner block |t| <= 2
    CHECK(delta_eval(j, {2, 3}, Vec{16.0, -8.0}) == 1.0);
    CHECK(delta_eval(j, {j, 0}, Vec{0.5, 64.0}) == 1.0);
    CHECK(delta_eval(j, {j, j}, Vec{-2.0, 1.0}) == 1.0);
    CHECK(delta_eval(j, {2, 3}, Vec{50.0, -10.0}) == 0.0);
    CHECK_THROWS_AS(delta_eval(j, {j + 1, 0}, Vec{1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(delta_eval(j, {0}, Vec{1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("cone cutoff derivatives scale like 2^{j|alpha|/2} on the unit sphere") {
    // C_j = max |d^alpha chi| 2^{-j|alpha|/2}; should not grow with j
    std::vector<double> C;
    for (int j : {4, 6, 8}) {
        DirectionNet net = build_direction_net(j, 2);
        double worst = 0.0;
        for (std::size_t v = 0; v < net.size(); v += std::max<std::size_t>(1, net.size() / 6)) {
            const auto& d = net[v];
            Vec perp{-d.vector[1], d.vector[0]};
            for (int s = -8; s <= 8; ++s) {
                Vec xi = normalized(d.vector + perp * (s * std::pow(2.0, -0.5 * j - 3.5)));
                ScalarField f = [&](const Vec& p) { return chi_eval(net, v, p); };
                for (const auto& a : multi_indices_up_to(2, 2)) {
                    if (a.order() == 0) continue;
                    double step = 1e-3 * std::pow(2.0, -0.5 * j);
                    double g = std::abs(finite_difference(f, xi, a, step));
                    worst = std::max(worst, g * std::pow(2.0, -0.5 * j * a.order()));
                }
            }
        }
        C.push_back(worst);
    }
    std::cout << "cone derivative constants:";
    for (double c : C) std::cout << ' ' << c;
    std::cout << '\n';
    for (double c : C) CHECK(c > 0.0);
    CHECK(C.back() / C.front() < 4.0);
}
