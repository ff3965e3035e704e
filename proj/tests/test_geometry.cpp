#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fio/geometry.hpp"

using namespace fio;

namespace {
bool contains_vec(const DirectionNet& net, const Vec& v) {
    for (const auto& d : net.directions())
        if (norm(d.vector - v) < 1e-15) return true;
    return false;
}
}  // namespace

TEST_CASE("level 0 nets are the coordinate axes") {
    for (int n : {2, 3}) {
        DirectionNet net = build_direction_net(0, n);
        CHECK(net.size() == static_cast<std::size_t>(2 * n));
        for (int i = 0; i < n; ++i) {
            CHECK(contains_vec(net, Vec::unit(n, i)));
            CHECK(contains_vec(net, Vec::unit(n, i) * -1.0));
        }
        CHECK(validate_direction_net(net, 10000).pass);
    }
}

TEST_CASE("level 6 net in the plane") {
    DirectionNet net = build_direction_net(6, 2);
    CHECK(net.size() >= 8);
    CHECK(net.size() <= 32 * 8);
    NetValidation v = validate_direction_net(net, 10000);
    CHECK(v.pass);
    CHECK(v.min_separation >= separation_radius(6));
}

TEST_CASE("nets validate where covering is feasible") {
    for (int j : {3, 4, 5, 8}) CHECK(validate_direction_net(build_direction_net(j, 2), 10000).pass);
    for (int j : {5, 6}) CHECK(validate_direction_net(build_direction_net(j, 3), 10000).pass);
    CHECK(build_direction_net(5, 3).size() == build_direction_net(5, 3).size());
}

TEST_CASE("low levels cannot meet the covering condition") {
    // 1 - sqrt(1 - tau^2) >= delta on the one-coordinate strata
    for (int j : {1, 2}) {
        double tau = component_floor(j), delta = separation_radius(j);
        CHECK(1.0 - std::sqrt(1.0 - tau * tau) >= delta);
        NetValidation v = validate_direction_net(build_direction_net(j, 2), 20000);
        CHECK_FALSE(v.covering_ok);
        CHECK(v.separation_ok);
        CHECK(v.axes_ok);
        CHECK(v.components_ok);
    }
}

TEST_CASE("constructed violations are reported") {
    const int j = 4;
    DirectionNet good = build_direction_net(j, 2);
    // two J-empty directions at distance 2^{-j/2-3}
    std::vector<Direction> dirs = good.directions();
    double ang = 0.25 * std::numbers::pi;
    double d = std::pow(2.0, -0.5 * j - 3.0);
    double dang = 2.0 * std::asin(0.5 * d);
    dirs.push_back(Direction{Vec{std::cos(ang), std::sin(ang)}, j, 0});
    dirs.push_back(Direction{Vec{std::cos(ang + dang), std::sin(ang + dang)}, j, 0});
    NetValidation v1 = validate_direction_net(DirectionNet(j, 2, dirs), 1000);
    CHECK_FALSE(v1.pass);
    CHECK_FALSE(v1.separation_ok);

    std::vector<Direction> missing;
    for (const auto& dd : good.directions())
        if (norm(dd.vector - Vec{1.0, 0.0}) > 1e-12) missing.push_back(dd);
    NetValidation v2 = validate_direction_net(DirectionNet(j, 2, missing), 1000);
    CHECK_FALSE(v2.pass);
    CHECK_FALSE(v2.axes_ok);
}

TEST_CASE("net file round trip") {
    DirectionNet net = build_direction_net(5, 3);
    std::stringstream ss;
    write_net(ss, net);
    DirectionNet back = read_net(ss, 3);
    REQUIRE(back.size() == net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        CHECK(back[i].vector == net[i].vector);
        CHECK(back[i].zero_mask == net[i].zero_mask);
    }
}

TEST_CASE("rotation to a direction") {
    Mat I = rotation_to_direction(Direction{Vec{1.0, 0.0}, 3, 2U});
    CHECK(I(0, 0) == 1.0);
    CHECK(I(1, 1) == 1.0);
    CHECK(I(0, 1) == 0.0);
    CHECK(I(1, 0) == 0.0);

    Mat R = rotation_to_direction(Direction{Vec{0.0, 1.0}, 3, 1U});
    CHECK(std::abs(determinant(R) - 1.0) < 1e-12);
    CHECK(std::abs(R(0, 0)) < 1e-15);
    CHECK(R(1, 0) == 1.0);
    CHECK(R(0, 1) == doctest::Approx(-1.0));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int t = 0; t < 50; ++t) {
        Vec d = normalized(Vec{g(rng), g(rng), g(rng)});
        Mat A = rotation_to_direction(Direction{d, 0, 0U});
        Mat P = A.transpose() * A;
        double err = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) err = std::max(err, std::abs(P(r, c) - (r == c ? 1.0 : 0.0)));
        CHECK(err < 1e-12);
        CHECK(std::abs(determinant(A) - 1.0) < 1e-12);
        CHECK(max_abs(A * Vec{1.0, 0.0, 0.0} - d) < 1e-12);
    }
    // J block is the identity for a direction with a zero coordinate
    Vec d{std::sqrt(0.5), 0.0, std::sqrt(0.5)};
    Mat A = rotation_to_direction(Direction{d, 4, 2U});
    CHECK(max_abs(A.column(1) - Vec{0.0, 1.0, 0.0}) < 1e-15);
    CHECK(std::abs(determinant(A) - 1.0) < 1e-12);
}

TEST_CASE("projection") {
    CHECK(projection(Direction{Vec{1.0, 0.0}, 0, 2U}, Vec{3.0, 4.0}) == 3.0);
    Vec u = normalized(Vec{1.0, 2.0});
    CHECK(std::abs(projection(Direction{u, 0, 0U}, Vec{-2.0, 1.0})) < 1e-12);
    Vec s{std::sqrt(0.5), std::sqrt(0.5)};
    CHECK(std::abs(projection(Direction{s, 0, 0U}, Vec{1.0, 0.0}) - std::sqrt(0.5)) < 1e-12);
}

TEST_CASE("rectangle membership is monotone in M") {
    Phase flat = phase_flat();
    Direction d{normalized(Vec{1.0, 0.3}), 4, 0U};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int t = 0; t < 2000; ++t) {
        Vec x{u(rng), u(rng)};
        for (auto kind : {Rectangle::Kind::Spatial, Rectangle::Kind::Dual}) {
            Rectangle small{d, Vec{0.1, 0.0}, 4, 1.0, kind};
            Rectangle big = small;
            big.M = 2.0;
            if (rectangle_contains(small, x, &flat)) CHECK(rectangle_contains(big, x, &flat));
        }
    }
}

TEST_CASE("exceptional set volume") {
    Phase flat = phase_flat();
    ExceptionalSet empty(Vec{0.0, 0.0}, 0.25, {}, &flat);
    CHECK(exceptional_set_volume(empty, 2, 2.0, 10000).volume == 0.0);

    // one dual rectangle: disc of radius M 2^{-j/2} cut by a slab of half width M 2^{-j}
    Direction d{Vec{1.0, 0.0}, 2, 2U};
    ExceptionalSet one(Vec{0.0, 0.0}, 0.25, {Rectangle{d, Vec{0.0, 0.0}, 2, 1.0, Rectangle::Kind::Dual}}, &flat);
    VolumeEstimate v = exceptional_set_volume(one, 2, 1.0, 200000);
    double R = 0.5, w = 0.25;
    double exact = 2.0 * (w * std::sqrt(R * R - w * w) + R * R * std::asin(w / R));
    CHECK(std::abs(v.volume - exact) <= 3.0 * v.std_error);
    double box = 2.0 * 1.0 * 0.25 * 2.0 * 1.0 * 0.5;
    CHECK(box == doctest::Approx(0.5));

    // |B*| scales at most linearly in r
    std::vector<std::shared_ptr<const DirectionNet>> nets;
    for (int k = 0; k <= 9; ++k) nets.push_back(std::make_shared<const DirectionNet>(build_direction_net(k, 2)));
    double prev = -1.0;
    for (int e = 2; e <= 5; ++e) {
        double r = std::ldexp(1.0, -e);
        ExceptionalSet es = ExceptionalSet::build(Vec{0.0, 0.0}, r, 1.0, 9, flat, nets);
        double vol = exceptional_set_volume(es, 2, 1.0, 40000).volume;
        CHECK(vol > 0.0);
        if (prev > 0.0) {
            CHECK(vol / prev >= 0.25);
            CHECK(vol / prev <= 1.0);
        }
        prev = vol;
    }
    CHECK_THROWS_AS(exceptional_set_volume(one, 2, 1.0, 100), std::invalid_argument);
}
