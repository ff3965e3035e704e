#include "fio/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fio {

namespace {
inline double s_fn(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
}  // namespace

double bump(double t) {
    double a = std::abs(t);
    if (a <= 1.0) return 1.0;
    if (a >= 2.0) return 0.0;
    double p = s_fn(2.0 - a);
    double q = s_fn(a - 1.0);
    return p / (p + q);
}

double eta_eval(const Direction& d, const Vec& xi) {
    double r = norm(xi);
    if (r == 0.0) throw std::invalid_argument("eta_eval: xi must be nonzero");
    const int n = xi.size();
    const double scale = std::pow(2.0, 0.5 * d.level + 2.0);
    const double jscale = std::pow(2.0, 0.5 * d.level);
    double arg = 0.0;
    double jprod = 1.0;
    for (int i = 0; i < n; ++i) {
        double ui = xi[i] / r;
        if (d.in_zero_set(i)) {
            jprod *= bump(jscale * std::abs(ui));
        } else {
            double t = scale * (ui - d.vector[i]);
            arg += t * t;
        }
    }
    if (jprod == 0.0) return 0.0;
    return bump(arg) * jprod;
}

namespace {
// eta_mu can be nonzero only within this distance of xi_mu (see eta_eval supports).
double eta_reach(const DirectionNet& net) {
    double delta = separation_radius(net.level());
    int jc = net.dim() - 1;
    return std::sqrt(2.0 * delta * delta + jc * 64.0 * delta * delta) * 1.0001;
}
}  // namespace

double eta_sum(const DirectionNet& net, const Vec& xi) {
    double r = norm(xi);
    if (r == 0.0) throw std::invalid_argument("eta_sum: xi must be nonzero");
    Vec u = xi * (1.0 / r);
    thread_local std::vector<std::size_t> hits;
    hits.clear();
    net.neighbors(u, std::min(net.max_query_radius(), eta_reach(net)), hits);
    std::sort(hits.begin(), hits.end());  // fixed summation order
    double s = 0.0;
    for (std::size_t h : hits) s += eta_eval(net[h], xi);
    return s;
}

double chi_eval(const DirectionNet& net, std::size_t v, const Vec& xi) {
    double num = eta_eval(net[v], xi);
    double den = eta_sum(net, xi);
    if (den <= 0.0) {
        std::string where;
        for (int i = 0; i < xi.size(); ++i) where += (i ? "," : "") + std::to_string(xi[i]);
        throw NetCoverageError("chi_eval: no cone covers xi = (" + where + ") at level " + std::to_string(net.level()));
    }
    return num / den;
}

bool in_cone(const Direction& d, const Vec& xi) {
    double r = norm(xi);
    if (r == 0.0) return false;
    double s = 0.0;
    double jbound = std::pow(2.0, 1.0 - 0.5 * d.level);
    for (int i = 0; i < xi.size(); ++i) {
        double ui = xi[i] / r;
        if (d.in_zero_set(i)) {
            if (std::abs(ui) > jbound) return false;
        } else {
            s += (ui - d.vector[i]) * (ui - d.vector[i]);
        }
    }
    return s <= std::pow(2.0, -d.level - 3.0);
}

double radial_eval(int j, const Vec& xi) {
    if (j < 0) throw std::invalid_argument("radial_eval: negative level");
    double r2 = norm2(xi);
    if (j == 0) return bump(r2);
    double s2 = r2 * std::pow(4.0, -j);
    return bump(s2) - bump(4.0 * s2);
}

double phi_lj(int l, int j, double t) {
    if (l < 0 || l > j) throw std::invalid_argument("phi_lj: need 0 <= l <= j");
    if (l == j) return bump(0.5 * t);
    return bump(std::ldexp(t, l - j - 1)) - bump(std::ldexp(t, l - j));
}

double delta_eval(int j, const std::vector<int>& ell, const Vec& xi) {
    if (static_cast<int>(ell.size()) != xi.size()) throw std::invalid_argument("delta_eval: ell has wrong length");
    double p = 1.0;
    for (int i = 0; i < xi.size(); ++i) {
        if (ell[i] < 0 || ell[i] > j) throw std::invalid_argument("delta_eval: ell out of range");
        p *= phi_lj(ell[i], j, xi[i]);
    }
    return p;
}

std::vector<std::vector<int>> all_ells(int j, int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> ell(n, 0);
    while (true) {
        out.push_back(ell);
        int a = n - 1;
        while (a >= 0 && ell[a] == j) ell[a--] = 0;
        if (a < 0) break;
        ++ell[a];
    }
    return out;
}

}  // namespace fio
