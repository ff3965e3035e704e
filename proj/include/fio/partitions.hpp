#pragma once

#include <stdexcept>
#include <vector>

#include "fio/geometry.hpp"
#include "fio/vec.hpp"

namespace fio {

/// Raised when the cone partition denominator vanishes, i.e. the net does not cover xi.
struct NetCoverageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// phi(t) = s(2-|t|) / (s(2-|t|) + s(|t|-1)),  s(u) = exp(-1/u) for u > 0.
double bump(double t);

double eta_eval(const Direction& d, const Vec& xi);

/// chi_j^v for direction index v of net.
double chi_eval(const DirectionNet& net, std::size_t v, const Vec& xi);

/// Sum over mu of eta_j^mu(xi), using only directions that can be nonzero.
double eta_sum(const DirectionNet& net, const Vec& xi);

/// Closed-inequality membership in Gamma_j^v.
bool in_cone(const Direction& d, const Vec& xi);

/// Psi_0(xi) = phi(|xi|^2);  Psi_j(xi) = Psi(2^{-j} xi) with Psi(xi) = phi(|xi|^2) - phi(4|xi|^2).
double radial_eval(int j, const Vec& xi);

/// phi_{l,j}(t).
double phi_lj(int l, int j, double t);

/// delta_ell(xi) = prod_i phi_{l_i, j}(xi_i).
double delta_eval(int j, const std::vector<int>& ell, const Vec& xi);

/// All ell with 0 <= l_i <= j.
std::vector<std::vector<int>> all_ells(int j, int n);

}  // namespace fio
