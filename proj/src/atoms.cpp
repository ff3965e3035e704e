#include "fio/atoms.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fio/partitions.hpp"

namespace fio {

double ball_volume(int n, double r) {
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0) * std::pow(r, n);
}

Atom make_atom(const Vec& x0, double r, const std::string& profile, const Grid& grid) {
    const int n = grid.dim();
    if (x0.size() != n) throw std::invalid_argument("make_atom: center has the wrong dimension");
    if (!(r >= 4.0 * grid.spacing()))
        throw std::invalid_argument("make_atom: radius " + std::to_string(r) + " is below 4 grid spacings");
    for (int i = 0; i < n; ++i)
        if (std::abs(x0[i]) + r > grid.half_width() - grid.spacing())
            throw std::invalid_argument("make_atom: ball leaves the grid box");
    if (profile != "odd" && profile != "radial-diff")
        throw std::invalid_argument("make_atom: unknown profile " + profile);

    Atom a{x0, r, std::vector<double>(grid.size(), 0.0)};
    std::vector<double> w(grid.size(), 0.0);
    CompensatedSum<double> sg, sw;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        Vec d = grid.point(p) - x0;
        double rho = norm(d) / r;
        if (rho >= 1.0) continue;
        w[p] = bump(2.0 * rho);
        double g = profile == "odd" ? (d[0] / r) * w[p] : w[p] - std::ldexp(bump(4.0 * rho), n);
        a.samples[p] = g;
        sg.add(g);
        sw.add(w[p]);
    }
    // the correction has the same support, so the ball is kept
    double c = sg.value() / sw.value();
    double peak = 0.0;
    for (std::size_t p = 0; p < grid.size(); ++p) {
        a.samples[p] -= c * w[p];
        peak = std::max(peak, std::abs(a.samples[p]));
    }
    if (peak == 0.0) throw std::invalid_argument("make_atom: profile vanishes on the grid");
    double s = 1.0 / (ball_volume(n, r) * peak);
    for (double& v : a.samples) v *= s;
    return a;
}

namespace {
template <typename T>
NormReport lp_impl(std::span<const T> f, double p, const Grid& grid) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be in [1, inf]");
    if (f.size() != grid.size()) throw std::invalid_argument("lp_norm: sample count does not match grid");
    NormReport r{p, 0.0, f.size(), grid.spacing()};
    if (std::isinf(p)) {
        for (const T& v : f) r.value = std::max(r.value, static_cast<double>(std::abs(v)));
        return r;
    }
    CompensatedSum<double> acc;
    for (const T& v : f) {
        double a = std::abs(v);
        acc.add(p == 1.0 ? a : p == 2.0 ? a * a : std::pow(a, p));
    }
    r.value = std::pow(acc.value() * grid.weight(), 1.0 / p);
    return r;
}
}  // namespace

NormReport lp_norm(std::span<const double> f, double p, const Grid& grid) { return lp_impl(f, p, grid); }
NormReport lp_norm(std::span<const cplx> f, double p, const Grid& grid) { return lp_impl(f, p, grid); }

std::vector<double> random_band_function(const Grid& grid, double r_lo, double r_hi, std::uint64_t seed) {
    Grid dual = grid.dual();
    if (!(0.0 <= r_lo && r_lo < r_hi && r_hi < dual.half_width()))
        throw std::invalid_argument("random_band_function: annulus must lie inside the xi-grid");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::vector<cplx> G(dual.size(), cplx(0.0));
    for (std::size_t k = 0; k < G.size(); ++k) {
        double a = gauss(rng), b = gauss(rng);
        double rad = norm(dual.point(k));
        if (rad >= r_lo && rad <= r_hi) G[k] = cplx(a, b);
    }
    // taking the real part symmetrises the spectrum, which keeps it in the annulus
    std::vector<cplx> u = idft(G, grid);
    std::vector<double> f(u.size());
    for (std::size_t p = 0; p < u.size(); ++p) f[p] = u[p].real();
    double nrm = lp_norm(std::span<const double>(f), 2.0, grid).value;
    if (nrm == 0.0) throw std::invalid_argument("random_band_function: annulus holds no grid frequencies");
    for (double& v : f) v /= nrm;
    return f;
}

}  // namespace fio
