#include "fio/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fio/parallel.hpp"
#include "fio/partitions.hpp"

namespace fio {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline cplx expi(double t) { return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)}; }

std::size_t next_pow2(double v) {
    std::size_t n = 1;
    while (static_cast<double>(n) < v) n <<= 1;
    return n;
}
}  // namespace

// ---------------------------------------------------------------- decomposition

std::shared_ptr<const Decomposition> Decomposition::build(int dim, int j_max) {
    if (j_max < 0) throw std::invalid_argument("Decomposition: j_max must be non-negative");
    auto d = std::make_shared<Decomposition>();
    d->dim = dim;
    d->j_max = j_max;
    for (int j = 0; j <= j_max; ++j) d->nets.push_back(std::make_shared<const DirectionNet>(build_direction_net(j, dim)));
    return d;
}

const DirectionNet& Decomposition::net(int j) const {
    if (j < 0 || j >= static_cast<int>(nets.size()) || !nets[j])
        throw std::invalid_argument("Decomposition: no net for level " + std::to_string(j));
    return *nets[j];
}

double piece_cutoff(const Decomposition& dec, const PieceId& piece, const Vec& xi) {
    if (piece.level == 0) return radial_eval(0, xi);
    double psi = radial_eval(piece.level, xi);
    if (psi == 0.0 || !piece.direction) return psi;
    return psi * chi_eval(dec.net(piece.level), *piece.direction, xi);
}

namespace {

double piece_r_max(int level) { return std::sqrt(2.0) * std::ldexp(1.0, level); }
double piece_r_min(int level) { return level == 0 ? 0.0 : std::ldexp(1.0, level - 1); }

// Euclidean reach on the sphere of the support of eta_j^v around xi_j^v.
double cone_reach(const Direction& d) {
    double delta = separation_radius(d.level);
    double tau = component_floor(d.level);
    return std::sqrt(2.0 * delta * delta + d.zero_count() * 4.0 * tau * tau) * 1.0001;
}

struct Box {
    Vec lo, hi;
};

Box piece_box(const FioSpec& spec, const PieceId& piece) {
    const int n = spec.x_grid.dim();
    double rmax = piece_r_max(piece.level), rmin = piece_r_min(piece.level);
    Box b{Vec(n), Vec(n)};
    for (int i = 0; i < n; ++i) {
        b.lo[i] = -rmax;
        b.hi[i] = rmax;
    }
    if (piece.level > 0 && piece.direction) {
        const Direction& d = spec.decomposition->net(piece.level)[*piece.direction];
        double rho = cone_reach(d);
        for (int i = 0; i < n; ++i) {
            double lo = std::max(-1.0, d.vector[i] - rho), hi = std::min(1.0, d.vector[i] + rho);
            b.lo[i] = std::min(rmin * lo, rmax * lo);
            b.hi[i] = std::max(rmin * hi, rmax * hi);
        }
    }
    return b;
}

void require_decomposition(const FioSpec& spec, const PieceId& piece) {
    if (piece.level == 0 && !piece.direction) return;
    if (!spec.decomposition) throw std::invalid_argument("piece evaluation needs a decomposition");
    if (piece.direction && piece.level > 0 && *piece.direction >= spec.decomposition->net(piece.level).size())
        throw std::invalid_argument("piece direction index out of range");
}

void check_frequency_box(const FioSpec& spec, std::optional<int> level) {
    double nyquist = spec.x_grid.dual().half_width();
    if (spec.xi_max > nyquist * (1.0 + 1e-12))
        throw ResolutionError("xi_max = " + std::to_string(spec.xi_max) + " exceeds the dual grid half width " +
                              std::to_string(nyquist));
    if (level && std::ldexp(1.0, *level + 1) > spec.xi_max * (1.0 + 1e-12))
        throw ResolutionError("level " + std::to_string(*level) + " needs xi_max >= 2^{j+1}");
}

void check_reach(const FioSpec& spec, double reach) {
    double L = spec.x_grid.half_width();
    if (reach > 0.5 * L * (1.0 + 1e-12))
        throw ResolutionError("xi-grid spacing 1/(2L) gives fewer than 4 points per oscillation: reach " +
                              std::to_string(reach) + " > L/2 = " + std::to_string(0.5 * L));
}

bool in_truncation(const FioSpec& spec, const Vec& xi) { return max_abs(xi) <= spec.xi_max; }

using Cutoff = std::function<double(const Vec&)>;

std::vector<cplx> apply_core(const FioSpec& spec, const Cutoff& cut, std::span<const cplx> f, const ApplyOptions& opt,
                             std::optional<int> level) {
    check_resolution(spec, level);
    const Grid& g = spec.x_grid;
    if (f.size() != g.size()) throw std::invalid_argument("apply: sample count does not match x_grid");
    Grid dual = g.dual();
    std::vector<cplx> G = dft(f, g);
    parallel_for_index(G.size(), [&](std::size_t k) {
        Vec xi = dual.point(k);
        if (!in_truncation(spec, xi)) {
            G[k] = 0.0;
            return;
        }
        double c = cut(xi);
        G[k] = c == 0.0 ? cplx(0.0) : G[k] * c;
    });

    std::vector<cplx> out(g.size(), cplx(0.0));
    const double rs = spec.symbol.x_support_radius;
    if (!opt.force_direct && spec.phase.is_translation() && spec.symbol.is_separable()) {
        parallel_for_index(G.size(), [&](std::size_t k) {
            if (G[k] == cplx(0.0)) return;
            Vec xi = dual.point(k);
            G[k] *= spec.symbol.xi_factor(xi) * expi(spec.phase.xi_part(xi));
        });
        std::vector<cplx> u = idft(G, g);
        parallel_for_index(out.size(), [&](std::size_t p) {
            Vec x = g.point(p);
            if (max_abs(x) >= rs) return;
            double b = spec.symbol.x_factor(x);
            if (b != 0.0) out[p] = b * u[p];
        });
        return out;
    }

    std::vector<Vec> xis;
    std::vector<cplx> ws;
    double w = dual.weight();
    for (std::size_t k = 0; k < G.size(); ++k)
        if (G[k] != cplx(0.0)) {
            xis.push_back(dual.point(k));
            ws.push_back(G[k] * w);
        }
    parallel_for_index(
        out.size(),
        [&](std::size_t p) {
            Vec x = g.point(p);
            if (max_abs(x) >= rs) return;
            CompensatedSum<cplx> acc;
            for (std::size_t k = 0; k < xis.size(); ++k) {
                cplx s = spec.symbol.eval(x, xis[k]);
                if (s == cplx(0.0)) continue;
                acc.add(expi(spec.phase.eval(x, xis[k])) * s * ws[k]);
            }
            out[p] = acc.value();
        },
        16);
    return out;
}

}  // namespace

void check_resolution(const FioSpec& spec, std::optional<int> level) {
    check_frequency_box(spec, level);
    check_reach(spec, spec.symbol.x_support_radius + spec.phase.wavefront_offset);
}

std::vector<cplx> apply_fio(const FioSpec& spec, std::span<const cplx> f, const ApplyOptions& opt) {
    return apply_core(spec, [](const Vec&) { return 1.0; }, f, opt, std::nullopt);
}

std::vector<cplx> apply_piece(const FioSpec& spec, const PieceId& piece, std::span<const cplx> f,
                              const ApplyOptions& opt) {
    require_decomposition(spec, piece);
    const Decomposition* dec = spec.decomposition.get();
    Cutoff cut = [dec, piece](const Vec& xi) {
        if (piece.level == 0) return radial_eval(0, xi);
        return piece_cutoff(*dec, piece, xi);
    };
    return apply_core(spec, cut, f, opt, piece.level);
}

double spectral_tail_mass(const FioSpec& spec, std::span<const cplx> f) {
    std::vector<cplx> fh = dft(f, spec.x_grid);
    Grid dual = spec.x_grid.dual();
    double in = 0.0, out = 0.0;
    for (std::size_t k = 0; k < fh.size(); ++k) (in_truncation(spec, dual.point(k)) ? in : out) += std::norm(fh[k]);
    return (in + out) > 0.0 ? out / (in + out) : 0.0;
}

// ---------------------------------------------------------------- kernels

namespace {

// Lattice points k / (2L) of the dual grid inside the piece box, with a(xi) = cut * weight.
struct PieceQuadrature {
    std::vector<Vec> xis;
    std::vector<double> weights;
};

PieceQuadrature piece_quadrature(const FioSpec& spec, const PieceId& piece, const std::vector<int>* ell) {
    const Grid dual = spec.x_grid.dual();
    const double dxi = dual.spacing();
    const double edge = dual.half_width();
    const int n = spec.x_grid.dim();
    Box b = piece_box(spec, piece);
    std::array<long, kMaxDim> lo{}, hi{}, cnt{};
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        double l = std::max({b.lo[a], -spec.xi_max, -edge});
        double h = std::min({b.hi[a], spec.xi_max, edge - 0.5 * dxi});
        lo[a] = static_cast<long>(std::ceil(l / dxi - 1e-9));
        hi[a] = static_cast<long>(std::floor(h / dxi + 1e-9));
        cnt[a] = std::max(0L, hi[a] - lo[a] + 1);
        total *= static_cast<std::size_t>(cnt[a]);
    }
    std::vector<double> cuts(total, 0.0);
    auto point = [&](std::size_t flat) {
        Vec xi(n);
        for (int a = n - 1; a >= 0; --a) {
            xi[a] = static_cast<double>(lo[a] + static_cast<long>(flat % cnt[a])) * dxi;
            flat /= cnt[a];
        }
        return xi;
    };
    const Decomposition* dec = spec.decomposition.get();
    parallel_for_index(total, [&](std::size_t p) {
        Vec xi = point(p);
        if (!in_truncation(spec, xi)) return;
        double c = piece.level == 0 ? radial_eval(0, xi) : piece_cutoff(*dec, piece, xi);
        if (c != 0.0 && ell) c *= delta_eval(piece.level, *ell, xi);
        cuts[p] = c;
    });
    PieceQuadrature q;
    double w = dual.weight();
    for (std::size_t p = 0; p < total; ++p)
        if (cuts[p] != 0.0) {
            q.xis.push_back(point(p));
            q.weights.push_back(cuts[p] * w);
        }
    return q;
}

cplx kernel_sum(const FioSpec& spec, const PieceQuadrature& q, const Vec& x, const Vec& y) {
    CompensatedSum<cplx> acc;
    for (std::size_t k = 0; k < q.xis.size(); ++k) {
        const Vec& xi = q.xis[k];
        cplx s = spec.symbol.eval(x, xi);
        if (s == cplx(0.0)) continue;
        acc.add(expi(spec.phase.eval(x, xi) - dot(y, xi)) * s * q.weights[k]);
    }
    return acc.value();
}

double direct_l1(const FioSpec& spec, const PieceId& piece, const Vec& y, const KernelL1Options& opt) {
    check_frequency_box(spec, piece.level > 0 ? std::optional<int>(piece.level) : std::nullopt);
    const double rs = spec.symbol.x_support_radius;
    double reach = rs + max_abs(y) + spec.phase.wavefront_offset;
    if (opt.y_prime) reach = std::max(reach, rs + max_abs(*opt.y_prime) + spec.phase.wavefront_offset);
    check_reach(spec, reach);
    PieceQuadrature q = piece_quadrature(spec, piece, nullptr);
    const Grid& g = spec.x_grid;
    double total = parallel_reduce_ordered<double>(
        g.size(), 0.0,
        [&](std::size_t b, std::size_t e) {
            CompensatedSum<double> acc;
            for (std::size_t p = b; p < e; ++p) {
                Vec x = g.point(p);
                if (max_abs(x) >= rs) continue;
                if (opt.exclude && opt.exclude->contains(x)) continue;
                cplx k = kernel_sum(spec, q, x, y);
                if (opt.y_prime) k -= kernel_sum(spec, q, x, *opt.y_prime);
                acc.add(std::abs(k));
            }
            return acc.value();
        },
        [](double a, double b) { return a + b; }, 256);
    return total * g.weight();
}

double lattice_l1(const FioSpec& spec, const PieceId& piece, const Vec& y, const KernelL1Options& opt) {
    if (!spec.phase.is_translation() || !spec.symbol.is_separable())
        throw std::invalid_argument("lattice kernel integral needs a translation phase and a separable symbol");
    const int n = spec.x_grid.dim();
    Mat A = Mat::identity(n);
    double rmax = piece_r_max(piece.level), rmin = piece_r_min(piece.level);
    std::vector<double> lo(n, -rmax), hi(n, rmax);
    if (piece.level > 0 && piece.direction) {
        const Direction& d = spec.decomposition->net(piece.level)[*piece.direction];
        A = rotation_to_direction(d);
        double ang = 2.0 * std::asin(std::min(1.0, 0.5 * cone_reach(d)));
        if (ang < 0.5 * std::numbers::pi) {
            lo[0] = rmin * std::cos(ang);
            hi[0] = rmax;
            for (int a = 1; a < n; ++a) {
                lo[a] = -rmax * std::sin(ang);
                hi[a] = rmax * std::sin(ang);
            }
        }
    }
    const double rs = spec.symbol.x_support_radius;
    double reach = norm(y) + rs * std::sqrt(static_cast<double>(n));
    if (opt.y_prime) reach += norm(*opt.y_prime - y);
    const double half_window = reach * opt.window_pad;
    const double deta = 1.0 / (2.0 * half_window);

    std::vector<int> N(n);
    std::vector<double> eta0(n), dw(n);
    std::size_t total = 1;
    for (int a = 0; a < n; ++a) {
        N[a] = static_cast<int>(std::max<std::size_t>(16, next_pow2(opt.eta_pad * (hi[a] - lo[a]) / deta)));
        eta0[a] = 0.5 * (lo[a] + hi[a]) - 0.5 * N[a] * deta;
        dw[a] = 1.0 / (N[a] * deta);
        total *= static_cast<std::size_t>(N[a]);
    }
    if (total > (std::size_t(1) << 27)) throw ResolutionError("lattice kernel grid too large");
    auto unflat = [&](std::size_t flat, std::array<int, kMaxDim>& idx) {
        int parity = 0;
        for (int a = n - 1; a >= 0; --a) {
            idx[a] = static_cast<int>(flat % N[a]);
            flat /= N[a];
            parity += idx[a];
        }
        return parity;
    };

    const Decomposition* dec = spec.decomposition.get();
    Vec shift(n);
    if (opt.y_prime) shift = y - *opt.y_prime;
    std::vector<cplx> data(total);
    parallel_for_index(total, [&](std::size_t p) {
        std::array<int, kMaxDim> idx{};
        int parity = unflat(p, idx);
        Vec eta(n);
        for (int a = 0; a < n; ++a) eta[a] = eta0[a] + idx[a] * deta;
        Vec xi = A * eta;
        double c = piece.level == 0 ? radial_eval(0, xi) : piece_cutoff(*dec, piece, xi);
        if (c == 0.0) {
            data[p] = 0.0;
            return;
        }
        cplx v = spec.symbol.xi_factor(xi) * expi(spec.phase.xi_part(xi)) * c;
        if (opt.y_prime) v *= (1.0 - expi(dot(shift, xi)));
        data[p] = (parity & 1) ? -v : v;
    });
    fft_inplace(data, N, +1);

    double cell = std::pow(deta, n);
    double dwvol = 1.0;
    for (int a = 0; a < n; ++a) dwvol *= dw[a];
    double sum = parallel_reduce_ordered<double>(
        total, 0.0,
        [&](std::size_t b, std::size_t e) {
            CompensatedSum<double> acc;
            std::array<int, kMaxDim> idx{};
            for (std::size_t q = b; q < e; ++q) {
                unflat(q, idx);
                Vec w(n);
                for (int a = 0; a < n; ++a) w[a] = (idx[a] - N[a] / 2) * dw[a];
                Vec x = y + A * w;
                if (max_abs(x) >= rs) continue;
                double beta = spec.symbol.x_factor(x);
                if (beta == 0.0) continue;
                if (opt.exclude && opt.exclude->contains(x)) continue;
                acc.add(beta * std::abs(data[q]));
            }
            return acc.value();
        },
        [](double a, double b) { return a + b; }, 4096);
    return sum * cell * dwvol;
}

}  // namespace

cplx kernel_eval(const FioSpec& spec, const PieceId& piece, const Vec& x, const Vec& y, const std::vector<int>* ell) {
    require_decomposition(spec, piece);
    check_frequency_box(spec, piece.level > 0 ? std::optional<int>(piece.level) : std::nullopt);
    check_reach(spec, max_abs(x - y) + spec.phase.wavefront_offset);
    if (ell && piece.level == 0) throw std::invalid_argument("kernel_eval: ell needs a level >= 1");
    PieceQuadrature q = piece_quadrature(spec, piece, ell);
    return kernel_sum(spec, q, x, y);
}

double kernel_l1_in_x(const FioSpec& spec, const PieceId& piece, const Vec& y, const KernelL1Options& opt) {
    require_decomposition(spec, piece);
    using M = KernelL1Options::Method;
    M method = opt.method;
    if (method == M::Auto)
        method = (spec.phase.is_translation() && spec.symbol.is_separable()) ? M::Lattice : M::Direct;
    return method == M::Lattice ? lattice_l1(spec, piece, y, opt) : direct_l1(spec, piece, y, opt);
}

// ---------------------------------------------------------------- multiplier kernel

double multiplier_kernel(double m, const Vec& z) {
    const int n = z.size();
    double r2 = norm2(z);
    if (r2 == 0.0) throw std::invalid_argument("multiplier_kernel: z must be nonzero");
    if (!(m > -n && m < 0.0)) throw std::invalid_argument("multiplier_kernel: need -n < m < 0");
    const double s = -m;
    const double pi = std::numbers::pi;
    const double c = pi * pi * r2;
    // u = e^t; integrand e^{-u} u^{s/2} (pi/u)^{n/2} e^{-c/u} in dt
    auto f = [&](double t) {
        double u = std::exp(t);
        return std::exp(-u + 0.5 * s * t + 0.5 * n * (std::log(pi) - t) - c / u);
    };
    double t_lo = std::log(c / 800.0) - 1.0;
    double t_hi = std::log(800.0);
    const double dt = 0.005;
    std::size_t steps = static_cast<std::size_t>(std::ceil((t_hi - t_lo) / dt));
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i <= steps; ++i) acc.add(f(t_lo + i * dt));
    return acc.value() * dt / std::tgamma(0.5 * s);
}

MultiplierDecay multiplier_kernel_decay(double m, int n, int points) {
    MultiplierDecay out;
    out.target = -n - m;
    std::vector<std::pair<double, double>> fit_pts;
    for (int i = 0; i < points; ++i) {
        double t = -12.0 + 6.0 * i / (points - 1);
        Vec z(n);
        z[0] = std::exp2(t);
        double k = multiplier_kernel(m, z);
        out.samples.emplace_back(z[0], k);
        if (!(k > 0.0)) out.positive = false;
        fit_pts.emplace_back(t, std::abs(k));
    }
    out.fit = fit_log2_slope_real(fit_pts);
    return out;
}

cplx ttstar_kernel(const FioSpec& spec, const Vec& xi, const Vec& eta) {
    const Grid& g = spec.x_grid;
    if (max_abs(xi - eta) * g.spacing() > 0.25)
        throw ResolutionError("ttstar_kernel: x-grid spacing too coarse for |xi - eta|");
    const double rs = spec.symbol.x_support_radius;
    cplx total = parallel_reduce_ordered<cplx>(
        g.size(), cplx(0.0),
        [&](std::size_t b, std::size_t e) {
            CompensatedSum<cplx> acc;
            for (std::size_t p = b; p < e; ++p) {
                Vec x = g.point(p);
                if (max_abs(x) >= rs) continue;
                cplx a = spec.symbol.eval(x, eta);
                if (a == cplx(0.0)) continue;
                cplx bb = std::conj(spec.symbol.eval(x, xi));
                acc.add(expi(spec.phase.eval(x, eta) - spec.phase.eval(x, xi)) * a * bb);
            }
            return acc.value();
        },
        [](cplx a, cplx b) { return a + b; }, 4096);
    return total * g.weight();
}

}  // namespace fio
