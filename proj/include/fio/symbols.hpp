#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fio/numerics.hpp"
#include "fio/vec.hpp"

namespace fio {

struct Direction;

/// Real phase Phi(x, xi), homogeneous of degree one in xi.
struct Phase {
    std::string name;
    std::function<double(const Vec& x, const Vec& xi)> eval;
    std::function<Vec(const Vec& x, const Vec& xi)> grad_x;   // optional; finite differences otherwise
    std::function<Vec(const Vec& x, const Vec& xi)> grad_xi;  // optional; finite differences otherwise

    // Set when Phi(x, xi) = x.xi + psi(xi).  Enables the translation fast paths.
    std::function<double(const Vec& xi)> xi_part;
    std::function<Vec(const Vec& xi)> xi_part_grad;

    /// Bound on |Phi_xi(x, xi) - x|_inf: how far the phase moves mass.
    double wavefront_offset = 0.0;

    bool is_translation() const { return static_cast<bool>(xi_part); }
};

Vec phase_grad_x(const Phase& phase, const Vec& x, const Vec& xi);
Vec phase_grad_xi(const Phase& phase, const Vec& x, const Vec& xi);

/// Symbol sigma(x, xi) with compact x-support.
struct Symbol {
    std::string name;
    double order = 0.0;
    double x_support_radius = 2.0;  // sigma(x, .) = 0 for |x|_inf >= this
    bool product_class_claimed = false;
    std::function<cplx(const Vec& x, const Vec& xi)> eval;

    // Optional separable form sigma = x_factor(x) * xi_factor(xi).
    std::function<double(const Vec& x)> x_factor;
    std::function<cplx(const Vec& xi)> xi_factor;

    // Optional exact d_xi^alpha d_x^beta sigma.
    std::function<cplx(const Vec& x, const Vec& xi, const MultiIndex& alpha, const MultiIndex& beta)> derivative;

    bool is_separable() const { return static_cast<bool>(x_factor) && static_cast<bool>(xi_factor); }
};

// ---- builtin library ----

/// beta(x) = prod phi(x_i / scale), support radius 2*scale.
double beta_cutoff(const Vec& x, double scale = 1.0);

Symbol sigma_order(double m, double support_scale = 1.0);
Symbol sigma_tilde(double m, double support_scale = 1.0);

Phase phase_flat();
Phase phase_shift(const Vec& z0);
Phase phase_halfwave();
Phase phase_curved(double eps);
/// Phi = x.xi - x.xi: no mixed Hessian at all.
Phase phase_zero();

/// Known builtin names, for config validation.
const std::vector<std::string>& builtin_symbol_names();
const std::vector<std::string>& builtin_phase_names();

struct BuiltinParams {
    double m = 0.0;
    double support_scale = 1.0;
    double eps = 0.1;
    std::vector<double> z0;
};

Symbol make_symbol(const std::string& name, const BuiltinParams& p);
Phase make_phase(const std::string& name, int dim, const BuiltinParams& p);

// ---- class checks ----

struct ClassCheckOptions {
    int max_order = 2;
    int k_max = 8;              // annuli |xi| in [2^k, 2^{k+1}], k = 0..k_max
    int angles = 16;
    double slope_ceiling = 0.1;
    bool use_analytic = true;   // use the symbol's derivative oracle when it has one
};

struct ClassCell {
    MultiIndex alpha;
    MultiIndex beta;
    std::vector<double> per_annulus;  // sup of |derivative| / majorant on each annulus
    double constant = 0.0;
    double slope = 0.0;
    int worst_annulus = 0;
    Vec worst_x;
    Vec worst_xi;
    bool ok = true;
};

struct ClassReport {
    std::string class_name;  // "S" or "product"
    double m = 0.0;
    std::string derivative_source;
    std::vector<ClassCell> cells;
    bool pass = true;
    std::optional<std::size_t> first_violation;
};

ClassReport check_class_S(const Symbol& sigma, double m, int dim, const ClassCheckOptions& opt = {});
ClassReport check_class_product(const Symbol& sigma, double m, int dim, const ClassCheckOptions& opt = {});

/// d_xi^alpha d_x^beta sigma at (x, xi) by nested central differences (real part and imaginary part separately).
cplx symbol_derivative_fd(const Symbol& sigma, const Vec& x, const Vec& xi, const MultiIndex& alpha, const MultiIndex& beta);

struct PhaseCheckOptions {
    double eps0 = 1e-3;
    double tolerance = 1e-8;
    int samples = 64;
    double xi_min_radius = 0.5;
    std::uint64_t seed = 7;
};

struct PhaseReport {
    double max_homogeneity_error = 0.0;
    double max_euler_error = 0.0;
    double min_abs_det = 0.0;
    bool homogeneity_ok = true;
    bool euler_ok = true;
    bool nondegenerate_ok = true;
    std::string failed_hypothesis;  // empty on pass
    bool pass = true;
};

PhaseReport check_phase(const Phase& phase, int dim, double x_radius, const PhaseCheckOptions& opt = {});

/// Mixed Hessian d^2 Phi / dx_i dxi_k.
Mat mixed_hessian(const Phase& phase, const Vec& x, const Vec& xi);

/// min over sampled xi, eta in the cone of d and x in [-x_radius, x_radius]^n of
/// |grad_x(Phi(x,xi) - Phi(x,eta))| / |xi - eta|.
double narrow_cone_separation(const Phase& phase, const Direction& d, double x_radius, int samples,
                              std::uint64_t seed = 11);

}  // namespace fio
