#include <doctest.h>

#include <cmath>

#include "fio/geometry.hpp"
#include "fio/symbols.hpp"

using namespace fio;

namespace {
Symbol custom(std::string name, std::function<double(const Vec&)> xi_part) {
    Symbol s;
    s.name = std::move(name);
    s.x_support_radius = 2.0;
    s.eval = [xi_part](const Vec& x, const Vec& xi) {
        double b = beta_cutoff(x);
        return b == 0.0 ? cplx(0.0) : cplx(b * xi_part(xi), 0.0);
    };
    return s;
}

ClassCheckOptions fast_opts() {
    ClassCheckOptions o;
    o.k_max = 8;
    o.angles = 8;
    return o;
}
}  // namespace

TEST_CASE("builtin symbol values") {
    Symbol s = sigma_order(-0.5);
    CHECK(s.eval(Vec{0.0, 0.0}, Vec{0.0, 0.0}).real() == 1.0);
    CHECK(s.eval(Vec{3.0, 0.0}, Vec{1.0, 1.0}).real() == 0.0);
    CHECK(s.eval(Vec{0.5, -0.5}, Vec{3.0, 4.0}).real() == doctest::Approx(std::pow(26.0, -0.25)));
    Symbol t = sigma_tilde(-0.5);
    CHECK(t.eval(Vec{0.0, 0.0}, Vec{0.0, 5.0}).real() == 0.0);
    CHECK(t.eval(Vec{0.0, 0.0}, Vec{1.0, 0.0}).real() == doctest::Approx(0.5 * std::pow(2.0, -0.25)));
    CHECK_THROWS_AS(make_symbol("nope", {}), std::invalid_argument);
    CHECK_THROWS_AS(make_phase("nope", 2, {}), std::invalid_argument);
}

TEST_CASE("analytic derivatives agree with finite differences") {
    Symbol s = sigma_order(-0.5);
    Vec x{0.7, -1.1}, xi{3.0, -2.0};
    for (const auto& a : multi_indices_up_to(2, 2))
        for (const auto& b : multi_indices_up_to(2, 2)) {
            cplx ex = s.derivative(x, xi, a, b);
            cplx fd = symbol_derivative_fd(s, x, xi, a, b);
            // order-4 mixed differences lose about eps/h^4 ~ 1e-4 to rounding
            CHECK(std::abs(ex - fd) <= 1e-3 * (1.0 + std::abs(ex)));
        }
}

TEST_CASE("sigma_order lies in both classes") {
    for (double m : {-0.5, -1.0, 0.0}) {
        for (int n : {2, 3}) {
            Symbol s = sigma_order(m);
            ClassReport S = check_class_S(s, m, n, fast_opts());
            ClassReport P = check_class_product(s, m, n, fast_opts());
            CHECK(S.pass);
            CHECK(P.pass);  // S implies product
            CHECK(S.derivative_source == "analytic");
        }
    }
    // derivative source switch
    ClassCheckOptions o = fast_opts();
    o.use_analytic = false;
    ClassReport fd = check_class_S(sigma_order(-0.5), -0.5, 2, o);
    CHECK(fd.pass);
    CHECK(fd.derivative_source == "finite-difference");
}

TEST_CASE("order reduction: a larger order passes, a smaller one fails") {
    Symbol s = sigma_order(-0.5);
    CHECK(check_class_S(s, 0.0, 2, fast_opts()).pass);
    ClassReport low = check_class_S(s, -1.0, 2, fast_opts());
    CHECK_FALSE(low.pass);
    REQUIRE(low.first_violation);
    CHECK(low.cells[*low.first_violation].slope == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("sigma_tilde is product class but not S") {
    Symbol t = sigma_tilde(-0.5);
    CHECK(check_class_product(t, -0.5, 2, fast_opts()).pass);
    ClassReport S = check_class_S(t, -0.5, 2, fast_opts());
    CHECK_FALSE(S.pass);
    REQUIRE(S.first_violation);
    const ClassCell& c = S.cells[*S.first_violation];
    CHECK(c.alpha[0] >= 1);
}

TEST_CASE("constructed class violations") {
    Symbol grow = custom("grow", [](const Vec& xi) { return 1.0 + norm(xi); });
    ClassReport r = check_class_S(grow, 0.0, 2, fast_opts());
    CHECK_FALSE(r.pass);
    REQUIRE(r.first_violation);
    CHECK(r.cells[*r.first_violation].alpha.order() == 0);
    CHECK(r.cells[*r.first_violation].beta.order() == 0);
    CHECK(r.cells[*r.first_violation].slope == doctest::Approx(1.0).epsilon(0.05));

    // smooth in xi_1 direction only: product class of order 1/2 but not S
    Symbol half = custom("half", [](const Vec& xi) { return std::sqrt(1.0 + std::abs(xi[0])); });
    CHECK(check_class_product(half, 0.5, 2, fast_opts()).pass);
    CHECK_FALSE(check_class_S(half, 0.5, 2, fast_opts()).pass);

    Symbol bad = custom("nan", [](const Vec& xi) { return norm(xi) > 100.0 ? NAN : 1.0; });
    CHECK_THROWS_AS(check_class_S(bad, 0.0, 2, fast_opts()), std::runtime_error);
    ClassCheckOptions o = fast_opts();
    o.max_order = 3;
    CHECK_THROWS_AS(check_class_S(sigma_order(0.0), 0.0, 2, o), std::invalid_argument);
}

TEST_CASE("phase checks") {
    for (int n : {2, 3}) {
        CHECK(check_phase(phase_flat(), n, 2.0).pass);
        CHECK(check_phase(phase_halfwave(), n, 2.0).pass);
        CHECK(check_phase(phase_curved(0.1), n, 2.0).pass);
        CHECK(check_phase(make_phase("phase_shift", n, {}), n, 2.0).pass);
        PhaseReport z = check_phase(phase_zero(), n, 2.0);
        CHECK_FALSE(z.pass);
        CHECK(z.failed_hypothesis == "nondegeneracy");
        CHECK(z.min_abs_det == 0.0);
    }
    PhaseReport flat = check_phase(phase_flat(), 2, 2.0);
    CHECK(flat.min_abs_det == doctest::Approx(1.0).epsilon(1e-6));

    Phase quad = phase_flat();
    quad.name = "quadratic";
    quad.eval = [](const Vec& x, const Vec& xi) { return dot(x, xi) + norm2(xi); };
    quad.grad_xi = {};
    quad.xi_part = {};
    CHECK(check_phase(quad, 2, 2.0).failed_hypothesis == "homogeneity");

    // Euler residual: a gradient that disagrees with the phase
    Phase wrong = phase_halfwave();
    wrong.grad_xi = [](const Vec& x, const Vec&) { return x; };
    PhaseReport e = check_phase(wrong, 2, 2.0);
    CHECK(e.failed_hypothesis == "euler");
    CHECK(e.max_euler_error > 0.1);
}

TEST_CASE("mixed Hessian") {
    Mat H = mixed_hessian(phase_curved(0.2), Vec{0.3, 0.0}, Vec{0.6, 0.8});
    CHECK(H(0, 0) == doctest::Approx(1.0 + 0.2 * std::cos(0.3) * 0.6).epsilon(1e-6));
    CHECK(H(0, 1) == doctest::Approx(0.2 * std::cos(0.3) * 0.8).epsilon(1e-6));
    CHECK(H(1, 0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
    CHECK(H(1, 1) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("narrow cone separation") {
    DirectionNet net = build_direction_net(6, 2);
    for (std::size_t v = 0; v < net.size(); v += 7) {
        CHECK(narrow_cone_separation(phase_flat(), net[v], 2.0, 200) == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(narrow_cone_separation(phase_halfwave(), net[v], 2.0, 200) == doctest::Approx(1.0).epsilon(1e-9));
        double c = narrow_cone_separation(phase_curved(0.1), net[v], 2.0, 200);
        CHECK(c > 0.5);
        CHECK(c < 1.5);
    }
    CHECK(narrow_cone_separation(phase_zero(), net[0], 2.0, 50) == 0.0);
}
