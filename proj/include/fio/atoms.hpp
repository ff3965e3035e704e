#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fio/numerics.hpp"

namespace fio {

/// H^1 atom sampled on a grid.
struct Atom {
    Vec center;
    double radius = 0.0;
    std::vector<double> samples;
};

/// Volume of the Euclidean ball of radius r in dimension n.
double ball_volume(int n, double r);

/// profile: "odd" (x_1-odd bump) or "radial-diff" (difference of two dilated bumps).
Atom make_atom(const Vec& x0, double r, const std::string& profile, const Grid& grid);

struct NormReport {
    double p = 2.0;  // +inf for the sup norm
    double value = 0.0;
    std::size_t points = 0;
    double spacing = 0.0;
};

NormReport lp_norm(std::span<const double> f, double p, const Grid& grid);
NormReport lp_norm(std::span<const cplx> f, double p, const Grid& grid);

/// Real field with unit L^2 norm whose spectrum lives in r_lo <= |xi| <= r_hi.
std::vector<double> random_band_function(const Grid& grid, double r_lo, double r_hi, std::uint64_t seed);

}  // namespace fio
