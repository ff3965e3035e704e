#include "fio/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fio/geometry.hpp"
#include "fio/parallel.hpp"
#include "fio/partitions.hpp"

namespace fio {

// ---------------------------------------------------------------- phase gradients

Vec phase_grad_x(const Phase& phase, const Vec& x, const Vec& xi) {
    if (phase.grad_x) return phase.grad_x(x, xi);
    Vec g(x.size());
    double h = default_fd_step(x);
    for (int i = 0; i < x.size(); ++i) {
        Vec a = x, b = x;
        a[i] += h;
        b[i] -= h;
        g[i] = (phase.eval(a, xi) - phase.eval(b, xi)) / (2.0 * h);
    }
    return g;
}

Vec phase_grad_xi(const Phase& phase, const Vec& x, const Vec& xi) {
    if (phase.grad_xi) return phase.grad_xi(x, xi);
    Vec g(xi.size());
    double h = default_fd_step(xi);
    for (int i = 0; i < xi.size(); ++i) {
        Vec a = xi, b = xi;
        a[i] += h;
        b[i] -= h;
        g[i] = (phase.eval(x, a) - phase.eval(x, b)) / (2.0 * h);
    }
    return g;
}

// ---------------------------------------------------------------- builtins

double beta_cutoff(const Vec& x, double scale) {
    double p = 1.0;
    for (int i = 0; i < x.size() && p != 0.0; ++i) p *= bump(x[i] / scale);
    return p;
}

namespace {

// k-th derivative of t -> phi(t / scale), k <= 2.
double bump_derivative(double t, int k, double scale) {
    if (k == 0) return bump(t / scale);
    const double h = 1e-4;
    auto f = [&](double s) { return bump(s / scale); };
    if (k == 1) return (f(t + h) - f(t - h)) / (2.0 * h);
    if (k == 2) return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    throw std::invalid_argument("bump_derivative: order > 2");
}

double beta_derivative(const Vec& x, const MultiIndex& b, double scale) {
    double p = 1.0;
    for (int i = 0; i < x.size() && p != 0.0; ++i) p *= bump_derivative(x[i], b[i], scale);
    return p;
}

// d^alpha (1 + |xi|^2)^{m/2} for |alpha| <= 2.
double bessel_multiplier_derivative(double m, const Vec& xi, const MultiIndex& a) {
    double q = 1.0 + norm2(xi);
    int ord = a.order();
    if (ord == 0) return std::pow(q, 0.5 * m);
    if (ord == 1) {
        int i = 0;
        while (a[i] == 0) ++i;
        return m * xi[i] * std::pow(q, 0.5 * m - 1.0);
    }
    int i = -1, k = -1;
    for (int c = 0; c < a.n; ++c)
        for (int r = 0; r < a[c]; ++r) (i < 0 ? i : k) = c;
    double v = m * (m - 2.0) * xi[i] * xi[k] * std::pow(q, 0.5 * m - 2.0);
    if (i == k) v += m * std::pow(q, 0.5 * m - 1.0);
    return v;
}

}  // namespace

Symbol sigma_order(double m, double support_scale) {
    Symbol s;
    s.name = "sigma_order";
    s.order = m;
    s.x_support_radius = 2.0 * support_scale;
    s.product_class_claimed = true;
    s.x_factor = [support_scale](const Vec& x) { return beta_cutoff(x, support_scale); };
    s.xi_factor = [m](const Vec& xi) { return cplx(std::pow(1.0 + norm2(xi), 0.5 * m), 0.0); };
    s.eval = [support_scale, m](const Vec& x, const Vec& xi) {
        double b = beta_cutoff(x, support_scale);
        if (b == 0.0) return cplx(0.0);
        return cplx(b * std::pow(1.0 + norm2(xi), 0.5 * m), 0.0);
    };
    s.derivative = [support_scale, m](const Vec& x, const Vec& xi, const MultiIndex& a, const MultiIndex& b) {
        if (a.order() > 2 || b.order() > 2) throw std::invalid_argument("sigma_order: derivative order > 2");
        return cplx(beta_derivative(x, b, support_scale) * bessel_multiplier_derivative(m, xi, a), 0.0);
    };
    return s;
}

Symbol sigma_tilde(double m, double support_scale) {
    Symbol base = sigma_order(m, support_scale);
    Symbol s;
    s.name = "sigma_tilde";
    s.order = m;
    s.x_support_radius = base.x_support_radius;
    s.product_class_claimed = true;
    s.x_factor = base.x_factor;
    s.xi_factor = [m](const Vec& xi) {
        double t = xi[0] * xi[0];
        return cplx(std::pow(1.0 + norm2(xi), 0.5 * m) * t / (1.0 + t), 0.0);
    };
    s.eval = [support_scale, m](const Vec& x, const Vec& xi) {
        double b = beta_cutoff(x, support_scale);
        if (b == 0.0) return cplx(0.0);
        double t = xi[0] * xi[0];
        return cplx(b * std::pow(1.0 + norm2(xi), 0.5 * m) * t / (1.0 + t), 0.0);
    };
    return s;
}

Phase phase_flat() {
    Phase p;
    p.name = "phase_flat";
    p.eval = [](const Vec& x, const Vec& xi) { return dot(x, xi); };
    p.grad_x = [](const Vec&, const Vec& xi) { return xi; };
    p.grad_xi = [](const Vec& x, const Vec&) { return x; };
    p.xi_part = [](const Vec&) { return 0.0; };
    p.xi_part_grad = [](const Vec& xi) { return Vec(xi.size()); };
    p.wavefront_offset = 0.0;
    return p;
}

Phase phase_shift(const Vec& z0) {
    Phase p;
    p.name = "phase_shift";
    p.eval = [z0](const Vec& x, const Vec& xi) { return dot(x, xi) + dot(z0, xi); };
    p.grad_x = [](const Vec&, const Vec& xi) { return xi; };
    p.grad_xi = [z0](const Vec& x, const Vec&) { return x + z0; };
    p.xi_part = [z0](const Vec& xi) { return dot(z0, xi); };
    p.xi_part_grad = [z0](const Vec&) { return z0; };
    p.wavefront_offset = max_abs(z0);
    return p;
}

Phase phase_halfwave() {
    Phase p;
    p.name = "phase_halfwave";
    p.eval = [](const Vec& x, const Vec& xi) { return dot(x, xi) + norm(xi); };
    p.grad_x = [](const Vec&, const Vec& xi) { return xi; };
    p.grad_xi = [](const Vec& x, const Vec& xi) { return x + xi * (1.0 / norm(xi)); };
    p.xi_part = [](const Vec& xi) { return norm(xi); };
    p.xi_part_grad = [](const Vec& xi) { return xi * (1.0 / norm(xi)); };
    p.wavefront_offset = 1.0;
    return p;
}

Phase phase_curved(double eps) {
    Phase p;
    p.name = "phase_curved";
    p.eval = [eps](const Vec& x, const Vec& xi) { return dot(x, xi) + eps * std::sin(x[0]) * norm(xi); };
    p.grad_x = [eps](const Vec& x, const Vec& xi) {
        Vec g = xi;
        g[0] += eps * std::cos(x[0]) * norm(xi);
        return g;
    };
    p.grad_xi = [eps](const Vec& x, const Vec& xi) { return x + xi * (eps * std::sin(x[0]) / norm(xi)); };
    p.wavefront_offset = std::abs(eps);
    return p;
}

Phase phase_zero() {
    Phase p;
    p.name = "phase_zero";
    p.eval = [](const Vec& x, const Vec& xi) { return dot(x, xi) - dot(x, xi); };
    p.grad_x = [](const Vec& x, const Vec&) { return Vec(x.size()); };
    p.grad_xi = [](const Vec&, const Vec& xi) { return Vec(xi.size()); };
    return p;
}

const std::vector<std::string>& builtin_symbol_names() {
    static const std::vector<std::string> names = {"sigma_order", "sigma_tilde"};
    return names;
}

const std::vector<std::string>& builtin_phase_names() {
    static const std::vector<std::string> names = {"phase_flat", "phase_shift", "phase_halfwave", "phase_curved",
                                                   "phase_zero"};
    return names;
}

Symbol make_symbol(const std::string& name, const BuiltinParams& p) {
    if (name == "sigma_order") return sigma_order(p.m, p.support_scale);
    if (name == "sigma_tilde") return sigma_tilde(p.m, p.support_scale);
    throw std::invalid_argument("unknown symbol name: " + name);
}

Phase make_phase(const std::string& name, int dim, const BuiltinParams& p) {
    if (name == "phase_flat") return phase_flat();
    if (name == "phase_halfwave") return phase_halfwave();
    if (name == "phase_curved") return phase_curved(p.eps);
    if (name == "phase_zero") return phase_zero();
    if (name == "phase_shift") {
        Vec z(dim);
        if (!p.z0.empty()) {
            if (static_cast<int>(p.z0.size()) != dim) throw std::invalid_argument("phase_shift: z0 has wrong dimension");
            for (int i = 0; i < dim; ++i) z[i] = p.z0[i];
        }
        return phase_shift(z);
    }
    throw std::invalid_argument("unknown phase name: " + name);
}

// ---------------------------------------------------------------- class checks

cplx symbol_derivative_fd(const Symbol& sigma, const Vec& x, const Vec& xi, const MultiIndex& alpha,
                          const MultiIndex& beta) {
    double hx = default_fd_step(x);
    double hxi = default_fd_step(xi);
    auto part = [&](bool imag) {
        ScalarField inner_at = [&](const Vec& xx) {
            ScalarField g = [&](const Vec& k) {
                cplx v = sigma.eval(xx, k);
                return imag ? v.imag() : v.real();
            };
            return finite_difference(g, xi, alpha, hxi);
        };
        return finite_difference(inner_at, x, beta, hx);
    };
    return {part(false), part(true)};
}

namespace {

std::vector<Vec> class_x_samples(int n, double radius) {
    std::vector<Vec> xs;
    Vec z(n);
    xs.push_back(z);
    Vec a(n), b(n);
    // inside the transition layer of the cutoff, where x-derivatives are nonzero
    const double pa[3] = {0.7, 0.55, -0.6};
    const double pb[3] = {-0.8, 0.65, 0.75};
    for (int i = 0; i < n; ++i) {
        a[i] = pa[i] * radius;
        b[i] = pb[i] * radius;
    }
    xs.push_back(a);
    xs.push_back(b);
    return xs;
}

std::vector<Vec> class_xi_samples(int n, int k, int angles) {
    std::vector<Vec> out;
    const double small[6] = {0.5, -0.5, 1.0, -1.0, 2.0, -2.0};
    for (double rho : {std::ldexp(1.0, k), 1.5 * std::ldexp(1.0, k)}) {
        if (n == 2) {
            for (int i = 0; i < angles; ++i) {
                double th = (i + 0.37) * 2.0 * std::numbers::pi / angles;
                out.push_back(Vec{rho * std::cos(th), rho * std::sin(th)});
            }
        } else {
            int cnt = angles * 2;
            double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < cnt; ++i) {
                double z = 1.0 - (2.0 * i + 1.0) / cnt;
                double r = std::sqrt(1.0 - z * z);
                out.push_back(Vec{rho * r * std::cos(golden * i), rho * r * std::sin(golden * i), rho * z});
            }
        }
        // near-axis points: one small coordinate, the rest of the radius on another axis
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                if (a == b) continue;
                for (double c : small) {
                    if (std::abs(c) >= rho) continue;
                    for (double sgn : {1.0, -1.0}) {
                        Vec v(n);
                        v[a] = c;
                        v[b] = sgn * std::sqrt(rho * rho - c * c);
                        out.push_back(v);
                    }
                }
            }
    }
    return out;
}

ClassReport run_class_check(const Symbol& sigma, double m, int dim, const ClassCheckOptions& opt, bool product) {
    if (opt.max_order > 2) throw std::invalid_argument("class check: max_order must be <= 2");
    ClassReport rep;
    rep.class_name = product ? "product" : "S";
    rep.m = m;
    bool analytic = opt.use_analytic && static_cast<bool>(sigma.derivative);
    rep.derivative_source = analytic ? "analytic" : "finite-difference";
    auto alphas = multi_indices_up_to(dim, opt.max_order);
    auto xs = class_x_samples(dim, sigma.x_support_radius);
    std::vector<std::vector<Vec>> xis(opt.k_max + 1);
    for (int k = 0; k <= opt.k_max; ++k) xis[k] = class_xi_samples(dim, k, opt.angles);

    rep.cells.resize(alphas.size() * alphas.size());
    parallel_for_index(
        rep.cells.size(),
        [&](std::size_t c) {
            ClassCell& cell = rep.cells[c];
            cell.alpha = alphas[c / alphas.size()];
            cell.beta = alphas[c % alphas.size()];
            cell.per_annulus.assign(opt.k_max + 1, 0.0);
            cell.worst_x = xs[0];
            cell.worst_xi = xis[0][0];
            for (int k = 0; k <= opt.k_max; ++k) {
                for (const Vec& xi : xis[k]) {
                    double maj;
                    if (product) {
                        maj = std::pow(1.0 + norm(xi), m);
                        for (int i = 0; i < dim; ++i) maj /= std::pow(1.0 + std::abs(xi[i]), cell.alpha[i]);
                    } else {
                        maj = std::pow(1.0 + norm(xi), m - cell.alpha.order());
                    }
                    for (const Vec& x : xs) {
                        cplx d = analytic ? sigma.derivative(x, xi, cell.alpha, cell.beta)
                                          : symbol_derivative_fd(sigma, x, xi, cell.alpha, cell.beta);
                        if (!std::isfinite(d.real()) || !std::isfinite(d.imag()))
                            throw std::runtime_error("class check: symbol not evaluable near xi with |xi| = " +
                                                     std::to_string(norm(xi)));
                        double ratio = std::abs(d) / maj;
                        if (ratio > cell.per_annulus[k]) {
                            cell.per_annulus[k] = ratio;
                            if (ratio > cell.constant) {
                                cell.constant = ratio;
                                cell.worst_x = x;
                                cell.worst_xi = xi;
                            }
                        }
                    }
                }
            }
            double peak = *std::max_element(cell.per_annulus.begin(), cell.per_annulus.end());
            if (peak <= 0.0) {
                cell.slope = 0.0;
            } else {
                // growth is judged on the upper half of the annuli, past the transient near |xi| ~ 1
                std::vector<std::pair<int, double>> pairs;
                for (int k = opt.k_max / 2; k <= opt.k_max; ++k)
                    pairs.emplace_back(k, std::max(cell.per_annulus[k], 1e-12 * peak));
                cell.slope = fit_log2_slope(pairs).slope;
            }
            cell.worst_annulus = static_cast<int>(
                std::max_element(cell.per_annulus.begin(), cell.per_annulus.end()) - cell.per_annulus.begin());
            cell.ok = cell.slope <= opt.slope_ceiling;
        },
        1);
    for (std::size_t c = 0; c < rep.cells.size(); ++c)
        if (!rep.cells[c].ok) {
            rep.pass = false;
            if (!rep.first_violation) rep.first_violation = c;
        }
    return rep;
}

}  // namespace

ClassReport check_class_S(const Symbol& sigma, double m, int dim, const ClassCheckOptions& opt) {
    return run_class_check(sigma, m, dim, opt, false);
}

ClassReport check_class_product(const Symbol& sigma, double m, int dim, const ClassCheckOptions& opt) {
    return run_class_check(sigma, m, dim, opt, true);
}

// ---------------------------------------------------------------- phase checks

Mat mixed_hessian(const Phase& phase, const Vec& x, const Vec& xi) {
    const int n = x.size();
    Mat H(n);
    double h = default_fd_step(xi);
    for (int k = 0; k < n; ++k) {
        Vec a = xi, b = xi;
        a[k] += h;
        b[k] -= h;
        Vec ga = phase_grad_x(phase, x, a);
        Vec gb = phase_grad_x(phase, x, b);
        for (int i = 0; i < n; ++i) H(i, k) = (ga[i] - gb[i]) / (2.0 * h);
    }
    return H;
}

PhaseReport check_phase(const Phase& phase, int dim, double x_radius, const PhaseCheckOptions& opt) {
    PhaseReport rep;
    rep.min_abs_det = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> ux(-x_radius, x_radius);
    std::uniform_real_distribution<double> ur(opt.xi_min_radius, opt.xi_min_radius + 8.0);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int s = 0; s < opt.samples; ++s) {
        Vec x(dim), u(dim);
        for (int i = 0; i < dim; ++i) {
            x[i] = ux(rng);
            u[i] = g(rng);
        }
        Vec xi = normalized(u) * ur(rng);
        double phi = phase.eval(x, xi);
        for (double d : {0.5, 2.0}) {
            double err = std::abs(phase.eval(x, xi * d) - d * phi) / (1.0 + std::abs(d * phi));
            rep.max_homogeneity_error = std::max(rep.max_homogeneity_error, err);
        }
        double euler = std::abs(dot(phase_grad_xi(phase, x, xi), xi) - phi) / (1.0 + std::abs(phi));
        rep.max_euler_error = std::max(rep.max_euler_error, euler);
        rep.min_abs_det = std::min(rep.min_abs_det, std::abs(determinant(mixed_hessian(phase, x, normalized(xi)))));
    }
    rep.homogeneity_ok = rep.max_homogeneity_error <= opt.tolerance;
    rep.euler_ok = rep.max_euler_error <= opt.tolerance;
    rep.nondegenerate_ok = rep.min_abs_det >= opt.eps0;
    if (!rep.homogeneity_ok)
        rep.failed_hypothesis = "homogeneity";
    else if (!rep.euler_ok)
        rep.failed_hypothesis = "euler";
    else if (!rep.nondegenerate_ok)
        rep.failed_hypothesis = "nondegeneracy";
    rep.pass = rep.failed_hypothesis.empty();
    return rep;
}

double narrow_cone_separation(const Phase& phase, const Direction& d, double x_radius, int samples,
                              std::uint64_t seed) {
    const int n = d.vector.size();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> ux(-x_radius, x_radius);
    std::uniform_real_distribution<double> ur(std::ldexp(1.0, d.level - 1), std::ldexp(1.0, d.level + 1));
    double spread = std::pow(2.0, -0.5 * d.level - 2.0);
    auto sample_in_cone = [&]() {
        for (int attempt = 0; attempt < 1000; ++attempt) {
            Vec u = d.vector;
            for (int i = 0; i < n; ++i)
                if (!d.in_zero_set(i)) u[i] += spread * g(rng) * 0.5;
            Vec xi = normalized(u) * ur(rng);
            if (in_cone(d, xi)) return xi;
        }
        return d.vector * ur(rng);
    };
    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        Vec xi = sample_in_cone();
        Vec eta = sample_in_cone();
        double dist = norm(xi - eta);
        if (dist == 0.0) continue;
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = ux(rng);
        double num = norm(phase_grad_x(phase, x, xi) - phase_grad_x(phase, x, eta));
        best = std::min(best, num / dist);
    }
    return best;
}

}  // namespace fio
