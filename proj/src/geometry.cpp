#include "fio/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fio/parallel.hpp"

namespace fio {

int Direction::zero_count() const {
    int c = 0;
    for (int i = 0; i < vector.size(); ++i) c += in_zero_set(i) ? 1 : 0;
    return c;
}

unsigned zero_pattern(const Vec& u, int j) {
    double tau = component_floor(j);
    unsigned mask = 0;
    for (int i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) < tau) mask |= 1U << i;
    return mask;
}

// ---------------------------------------------------------------- SphereIndex

namespace {
constexpr long kKeyOffset = 1L << 20;
constexpr std::int64_t kKeyBase = 1LL << 21;
}  // namespace

SphereIndex::SphereIndex(const std::vector<Vec>& points, double cell) : cell_(cell) {
    if (!(cell > 0.0)) throw std::invalid_argument("SphereIndex: cell must be positive");
    if (!points.empty()) dim_ = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) insert(points[i], i);
}

std::array<long, kMaxDim> SphereIndex::cell_of(const Vec& p) const {
    std::array<long, kMaxDim> c{};
    for (int a = 0; a < p.size(); ++a) c[a] = static_cast<long>(std::floor(p[a] / cell_));
    return c;
}

std::int64_t SphereIndex::key(const std::array<long, kMaxDim>& c) const {
    std::int64_t k = 0;
    for (int a = 0; a < kMaxDim; ++a) k = k * kKeyBase + (c[a] + kKeyOffset);
    return k;
}

void SphereIndex::insert(const Vec& p, std::size_t index) {
    if (dim_ == 0) dim_ = p.size();
    if (points_.size() <= index) points_.resize(index + 1, Vec(dim_));
    points_[index] = p;
    buckets_[key(cell_of(p))].push_back(index);
}

void SphereIndex::query(const Vec& q, double radius, std::vector<std::size_t>& out) const {
    if (radius > cell_ * (1.0 + 1e-12)) throw std::invalid_argument("SphereIndex: query radius exceeds cell size");
    auto base = cell_of(q);
    double r2 = radius * radius;
    std::array<long, kMaxDim> c{};
    int n = q.size();
    int total = 1;
    for (int a = 0; a < n; ++a) total *= 3;
    for (int t = 0; t < total; ++t) {
        int rem = t;
        for (int a = 0; a < n; ++a) {
            c[a] = base[a] + (rem % 3) - 1;
            rem /= 3;
        }
        auto it = buckets_.find(key(c));
        if (it == buckets_.end()) continue;
        for (std::size_t idx : it->second)
            if (norm2(points_[idx] - q) <= r2) out.push_back(idx);
    }
}

// ---------------------------------------------------------------- DirectionNet

DirectionNet::DirectionNet(int level, int dim, std::vector<Direction> directions)
    : level_(level), dim_(dim), dirs_(std::move(directions)) {
    std::vector<Vec> pts;
    pts.reserve(dirs_.size());
    for (const auto& d : dirs_) pts.push_back(d.vector);
    index_ = SphereIndex(pts, 12.0 * separation_radius(level));
}

void DirectionNet::neighbors(const Vec& u, double radius, std::vector<std::size_t>& out) const {
    index_.query(u, radius, out);
}

std::vector<std::size_t> DirectionNet::stratum(unsigned mask) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < dirs_.size(); ++i)
        if (dirs_[i].zero_mask == mask) out.push_back(i);
    return out;
}

namespace {

unsigned mask_from_support(int n, const std::vector<int>& I) {
    unsigned full = (1U << n) - 1U;
    unsigned m = full;
    for (int i : I) m &= ~(1U << i);
    return m;
}

// Equally spaced points on the arc theta in [t0, t1] of a circle of radius rho,
// as many as possible with chord >= delta.
std::vector<double> arc_angles(double t0, double t1, double rho, double delta) {
    double len = t1 - t0;
    if (len <= 0.0) return {0.5 * (t0 + t1)};
    double s = delta / (2.0 * rho);
    if (s >= 1.0) return {0.5 * (t0 + t1)};
    double dmin = 2.0 * std::asin(s) * (1.0 + 1e-12);
    std::size_t k = static_cast<std::size_t>(std::floor(len / dmin)) + 1;
    if (k == 1) return {0.5 * (t0 + t1)};
    std::vector<double> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = t0 + len * static_cast<double>(i) / static_cast<double>(k - 1);
    return out;
}

// (a, b) on the unit circle of the I-plane with both |a|,|b| >= tau, positive quadrant.
std::vector<std::pair<double, double>> quadrant_arc(double tau, double delta) {
    std::vector<std::pair<double, double>> out;
    if (tau > std::sqrt(0.5) + 1e-15) return out;
    double t0 = std::asin(std::min(1.0, tau));
    double t1 = 0.5 * std::numbers::pi - t0;
    for (double th : arc_angles(t0, t1, 1.0, delta)) {
        double a = std::cos(th), b = std::sin(th);
        if (a < tau) {
            a = tau;
            b = std::sqrt(1.0 - tau * tau);
        }
        if (b < tau) {
            b = tau;
            a = std::sqrt(1.0 - tau * tau);
        }
        if (t1 <= t0) a = b = tau;  // single corner point (tau, tau)
        out.emplace_back(a, b);
    }
    return out;
}

// Greedy delta-packing of {u in S^2 : u_i >= tau for all i}, followed by hole filling.
std::vector<Vec> pack_positive_octant(double tau, double delta) {
    std::vector<Vec> accepted;
    if (3.0 * tau * tau > 1.0 + 1e-15) return accepted;
    SphereIndex idx(std::vector<Vec>{}, delta);
    std::vector<std::size_t> hits;
    auto admissible = [&](const Vec& u) {
        for (int i = 0; i < 3; ++i)
            if (u[i] < tau) return false;
        return true;
    };
    auto try_add = [&](Vec u) {
        if (!admissible(u)) return false;
        hits.clear();
        idx.query(u, delta, hits);
        for (std::size_t h : hits)
            if (norm(accepted[h] - u) < delta) return false;
        idx.insert(u, accepted.size());
        accepted.push_back(u);
        return true;
    };

    double rho = std::sqrt(std::max(0.0, 1.0 - tau * tau));
    // corners and boundary curves u_k = tau
    for (int k = 0; k < 3; ++k) {
        int a = (k + 1) % 3, b = (k + 2) % 3;
        double t0 = rho > 0 ? std::asin(std::min(1.0, tau / rho)) : 0.0;
        double t1 = 0.5 * std::numbers::pi - t0;
        for (double th : arc_angles(t0, t1, rho, delta)) {
            Vec u(3);
            u[k] = tau;
            u[a] = std::max(tau, rho * std::cos(th));
            u[b] = std::max(tau, rho * std::sin(th));
            u = normalized(u);
            for (int i = 0; i < 3; ++i) u[i] = std::max(u[i], tau);
            try_add(u);
        }
    }
    // latitude rings about the z axis
    double dtheta = 2.0 * std::asin(0.5 * delta) * (1.0 + 1e-12);
    double theta_max = std::acos(tau);
    for (double th = theta_max; th >= 0.0; th -= dtheta) {
        double st = std::sin(th);
        if (st < tau) break;  // x, y >= tau impossible beyond this ring
        double pa = std::asin(std::min(1.0, tau / st));
        double pb = std::acos(std::min(1.0, tau / st));
        for (double ph : arc_angles(pa, pb, st, delta)) {
            Vec u{st * std::cos(ph), st * std::sin(ph), std::cos(th)};
            try_add(u);
        }
    }
    // hole filling on a dense Fibonacci lattice
    double spacing = delta / 3.0;
    std::size_t count = static_cast<std::size_t>(std::ceil(4.0 * std::numbers::pi / (spacing * spacing)));
    double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
        double z = 1.0 - (2.0 * static_cast<double>(i) + 1.0) / static_cast<double>(count);
        if (z < tau) break;
        double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
        double ph = golden * static_cast<double>(i);
        Vec u{rr * std::cos(ph), rr * std::sin(ph), z};
        if (!admissible(u)) continue;
        try_add(u);
    }
    // the lattice leaves small holes near Voronoi vertices; add the uncovered
    // spherical circumcentres of close triples until none is left
    for (int pass = 0; pass < 32; ++pass) {
        SphereIndex wide(accepted, 2.0 * delta);
        std::vector<std::size_t> near;
        std::size_t before = accepted.size();
        for (std::size_t a = 0; a < before; ++a) {
            near.clear();
            wide.query(accepted[a], 2.0 * delta, near);
            for (std::size_t p = 0; p < near.size(); ++p)
                for (std::size_t q = p + 1; q < near.size(); ++q) {
                    if (near[p] == a || near[q] == a) continue;
                    const Vec &A = accepted[a], &B = accepted[near[p]], &C = accepted[near[q]];
                    Vec ab = B - A, ac = C - A;
                    Vec c{ab[1] * ac[2] - ab[2] * ac[1], ab[2] * ac[0] - ab[0] * ac[2], ab[0] * ac[1] - ab[1] * ac[0]};
                    if (norm(c) < 1e-14) continue;
                    c = normalized(c);
                    if (dot(c, A) < 0.0) c = c * -1.0;
                    if (norm(c - A) < delta) continue;
                    try_add(c);
                }
        }
        if (accepted.size() == before) break;
    }
    return accepted;
}

}  // namespace

DirectionNet build_direction_net(int j, int n) {
    if (n != 2 && n != 3) throw std::invalid_argument("build_direction_net: n must be 2 or 3");
    if (j < 0 || j > 16) throw std::invalid_argument("build_direction_net: level must be in [0,16]");
    double tau = component_floor(j);
    double delta = separation_radius(j);
    std::vector<Direction> dirs;
    auto push = [&](const Vec& v, unsigned mask) { dirs.push_back(Direction{v, j, mask}); };

    // |I| = 1: the axes
    for (int i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            Vec v(n);
            v[i] = s;
            push(v, mask_from_support(n, {i}));
        }
    // |I| = 2: quadrant arcs in each coordinate plane
    auto arc = quadrant_arc(tau, delta);
    for (int p = 0; p < n; ++p)
        for (int q = p + 1; q < n; ++q) {
            unsigned mask = mask_from_support(n, {p, q});
            for (double sp : {1.0, -1.0})
                for (double sq : {1.0, -1.0})
                    for (auto [a, b] : arc) {
                        Vec v(n);
                        v[p] = sp * a;
                        v[q] = sq * b;
                        push(v, mask);
                    }
        }
    // |I| = 3
    if (n == 3) {
        auto octant = pack_positive_octant(tau, delta);
        for (double s0 : {1.0, -1.0})
            for (double s1 : {1.0, -1.0})
                for (double s2 : {1.0, -1.0})
                    for (const Vec& u : octant) push(Vec{s0 * u[0], s1 * u[1], s2 * u[2]}, 0U);
    }
    return DirectionNet(j, n, std::move(dirs));
}

// ---------------------------------------------------------------- validation

NetValidation validate_direction_net(const DirectionNet& net, std::size_t samples, std::uint64_t seed) {
    NetValidation rep;
    rep.samples = samples;
    const int n = net.dim();
    const int j = net.level();
    const double tau = component_floor(j);
    const double delta = separation_radius(j);
    auto fail = [&](bool& flag, const std::string& what) {
        flag = false;
        rep.pass = false;
        if (rep.first_violation.empty()) rep.first_violation = what;
    };

    // (iii) and the zero pattern bookkeeping
    for (std::size_t v = 0; v < net.size(); ++v) {
        const Direction& d = net[v];
        if (std::abs(norm(d.vector) - 1.0) > 1e-12) {
            fail(rep.components_ok, "direction " + std::to_string(v) + " is not a unit vector");
            break;
        }
        for (int i = 0; i < n; ++i) {
            double c = d.vector[i];
            bool zero = (c == 0.0);
            if (zero != d.in_zero_set(i) || (!zero && std::abs(c) < tau)) {
                fail(rep.components_ok, "condition (iii) fails at direction " + std::to_string(v));
                break;
            }
        }
    }

    // (ii)
    for (int i = 0; i < n; ++i)
        for (double s : {1.0, -1.0}) {
            Vec e = Vec::unit(n, i) * s;
            bool found = false;
            for (const auto& d : net.directions())
                if (d.vector == e) found = true;
            if (!found) fail(rep.axes_ok, "condition (ii): missing " + std::string(s > 0 ? "+" : "-") + "e" + std::to_string(i + 1));
        }

    // (i)
    {
        std::vector<Vec> pts;
        for (const auto& d : net.directions()) pts.push_back(d.vector);
        SphereIndex idx(pts, delta);
        double min_sep = std::numeric_limits<double>::infinity();
        std::vector<std::size_t> hits;
        std::size_t bad_a = 0, bad_b = 0;
        bool bad = false;
        for (std::size_t a = 0; a < pts.size(); ++a) {
            hits.clear();
            idx.query(pts[a], delta, hits);
            for (std::size_t b : hits) {
                if (b == a) continue;
                double dd = norm(pts[a] - pts[b]);
                min_sep = std::min(min_sep, dd);
                if (dd < delta && !bad) {
                    bad = true;
                    bad_a = a;
                    bad_b = b;
                }
            }
        }
        rep.min_separation = std::isfinite(min_sep) ? min_sep : delta;
        if (bad)
            fail(rep.separation_ok, "condition (i): directions " + std::to_string(bad_a) + " and " +
                                        std::to_string(bad_b) + " closer than 2^{-j/2-2}");
    }

    // (iv) on uniform sphere samples
    {
        const unsigned full = (1U << n) - 1U;
        std::size_t chunk = 4096;
        std::size_t chunks = (samples + chunk - 1) / chunk;
        std::vector<std::size_t> uncovered(chunks, 0);
        std::vector<std::string> first(chunks);
        parallel_for_index(
            chunks,
            [&](std::size_t c) {
                std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + c);
                std::normal_distribution<double> g(0.0, 1.0);
                std::vector<std::size_t> hits;
                std::size_t e = std::min(samples, (c + 1) * chunk);
                for (std::size_t s = c * chunk; s < e; ++s) {
                    Vec u(n);
                    for (int i = 0; i < n; ++i) u[i] = g(rng);
                    u = normalized(u);
                    unsigned J = zero_pattern(u, j);
                    if (J == full) continue;  // no admissible stratum: vacuous
                    int jc = 0;
                    for (int i = 0; i < n; ++i) jc += (J >> i) & 1U;
                    double radius = std::min(net.max_query_radius(), std::sqrt(delta * delta + jc * tau * tau) * 1.001);
                    hits.clear();
                    net.neighbors(u, radius, hits);
                    bool ok = false;
                    for (std::size_t h : hits) {
                        const Direction& d = net[h];
                        if (d.zero_mask != J) continue;
                        double s2 = 0.0;
                        for (int i = 0; i < n; ++i)
                            if (!((J >> i) & 1U)) s2 += (u[i] - d.vector[i]) * (u[i] - d.vector[i]);
                        if (s2 < delta * delta) {
                            ok = true;
                            break;
                        }
                    }
                    if (!ok) {
                        if (uncovered[c] == 0) {
                            std::ostringstream os;
                            os << std::setprecision(6) << "condition (iv): uncovered sample (";
                            for (int i = 0; i < n; ++i) os << (i ? ", " : "") << u[i];
                            os << ") with J-mask " << J;
                            first[c] = os.str();
                        }
                        ++uncovered[c];
                    }
                }
            },
            1);
        for (std::size_t c = 0; c < chunks; ++c) {
            rep.uncovered += uncovered[c];
            if (uncovered[c] && rep.covering_ok) fail(rep.covering_ok, first[c]);
        }
    }
    return rep;
}

// ---------------------------------------------------------------- rotation

Mat rotation_to_direction(const Direction& d) {
    const int n = d.vector.size();
    Mat A(n);
    std::vector<Vec> cols(n, Vec(n));
    std::vector<bool> fixed(n, false);
    cols[0] = d.vector;
    fixed[0] = true;
    for (int k = 1; k < n; ++k)
        if (d.in_zero_set(k)) {
            cols[k] = Vec::unit(n, k);
            fixed[k] = true;
        }
    // Gram-Schmidt over the standard basis for the remaining columns
    int next_basis = 0;
    for (int k = 1; k < n; ++k) {
        if (fixed[k]) continue;
        while (next_basis < n) {
            Vec v = Vec::unit(n, next_basis++);
            for (int c = 0; c < n; ++c)
                if (fixed[c]) v -= cols[c] * dot(v, cols[c]);
            if (norm(v) > 1e-8) {
                cols[k] = normalized(v);
                fixed[k] = true;
                break;
            }
        }
    }
    for (int c = 0; c < n; ++c)
        for (int r = 0; r < n; ++r) A(r, c) = cols[c][r];
    if (determinant(A) < 0.0) {
        int flip = n - 1;
        for (int k = n - 1; k >= 1; --k)
            if (!d.in_zero_set(k)) {
                flip = k;
                break;
            }
        for (int r = 0; r < n; ++r) A(r, flip) = -A(r, flip);
    }
    return A;
}

// ---------------------------------------------------------------- rectangles / B*

bool rectangle_contains(const Rectangle& rect, const Vec& x, const Phase* phase) {
    Vec v(x.size());
    if (rect.kind == Rectangle::Kind::Dual) {
        v = x - rect.center;
    } else {
        if (!phase) throw std::invalid_argument("rectangle_contains: spatial rectangle needs a phase");
        v = rect.center - phase_grad_xi(*phase, x, rect.direction.vector);
    }
    double long_side = rect.M * std::pow(2.0, -0.5 * rect.scale);
    double short_side = rect.M * std::pow(2.0, -static_cast<double>(rect.scale));
    return norm(v) <= long_side && std::abs(dot(v, rect.direction.vector)) <= short_side;
}

ExceptionalSet::ExceptionalSet(const Vec& center, double radius, std::vector<Rectangle> rects, const Phase* phase)
    : center_(center), radius_(radius), rects_(std::move(rects)), phase_(phase) {
    anchors_.resize(rects_.size());
    std::unordered_map<int, std::size_t> scale_slot;
    for (std::size_t i = 0; i < rects_.size(); ++i) {
        const Rectangle& r = rects_[i];
        bool anchored = true;
        if (r.kind == Rectangle::Kind::Dual) {
            anchors_[i] = r.center;
        } else if (phase_ && phase_->is_translation()) {
            Vec g = phase_->xi_part_grad ? phase_->xi_part_grad(r.direction.vector)
                                         : phase_grad_xi(*phase_, Vec(r.center.size()), r.direction.vector);
            anchors_[i] = r.center - g;
        } else {
            anchored = false;
        }
        if (!anchored) {
            unanchored_.push_back(i);
            continue;
        }
        double rad = r.M * std::pow(2.0, -0.5 * r.scale);
        // group by (scale, M) through the ball radius
        int slot_key = r.scale * 1000 + static_cast<int>(std::lround(r.M * 8));
        auto it = scale_slot.find(slot_key);
        if (it == scale_slot.end()) {
            it = scale_slot.emplace(slot_key, by_scale_.size()).first;
            by_scale_.push_back(Bucketed{rad, {}});
        }
        Bucketed& b = by_scale_[it->second];
        b.cells[cell_key(anchors_[i], b.radius)].push_back(i);
    }
}

std::int64_t ExceptionalSet::cell_key(const Vec& p, double radius) const {
    std::int64_t k = 0;
    for (int a = 0; a < kMaxDim; ++a) {
        long c = a < p.size() ? static_cast<long>(std::floor(p[a] / radius)) : 0;
        k = k * kKeyBase + (c + kKeyOffset);
    }
    return k;
}

bool ExceptionalSet::contains(const Vec& x) const {
    const int n = x.size();
    int total = 1;
    for (int a = 0; a < n; ++a) total *= 3;
    for (const Bucketed& b : by_scale_) {
        Vec probe(n);
        for (int t = 0; t < total; ++t) {
            int rem = t;
            for (int a = 0; a < n; ++a) {
                probe[a] = x[a] + ((rem % 3) - 1) * b.radius;
                rem /= 3;
            }
            auto it = b.cells.find(cell_key(probe, b.radius));
            if (it == b.cells.end()) continue;
            for (std::size_t i : it->second)
                if (rectangle_contains(rects_[i], x, phase_)) return true;
        }
    }
    for (std::size_t i : unanchored_)
        if (rectangle_contains(rects_[i], x, phase_)) return true;
    return false;
}

ExceptionalSet ExceptionalSet::build(const Vec& center, double radius, double M, int k_max, const Phase& phase,
                                     const std::vector<std::shared_ptr<const DirectionNet>>& nets) {
    if (!(radius > 0.0)) throw std::invalid_argument("ExceptionalSet: radius must be positive");
    int k_min = std::max(0, static_cast<int>(std::ceil(-std::log2(radius) - 1e-12)));
    std::vector<Rectangle> rects;
    for (int k = k_min; k <= k_max; ++k) {
        if (k >= static_cast<int>(nets.size()) || !nets[k])
            throw std::invalid_argument("ExceptionalSet: missing direction net for level " + std::to_string(k));
        for (const auto& d : nets[k]->directions())
            rects.push_back(Rectangle{d, center, k, M, Rectangle::Kind::Spatial});
    }
    return ExceptionalSet(center, radius, std::move(rects), &phase);
}

VolumeEstimate exceptional_set_volume(const ExceptionalSet& es, int dim, double box_half_width, std::size_t mc_samples,
                                      std::uint64_t seed) {
    if (mc_samples < 10000) throw std::invalid_argument("exceptional_set_volume: need at least 10^4 samples");
    double box = std::pow(2.0 * box_half_width, dim);
    if (es.rectangles().empty()) return {0.0, 0.0};
    std::size_t chunk = 8192;
    std::size_t hits = parallel_reduce_ordered<std::size_t>(
        (mc_samples + chunk - 1) / chunk, 0,
        [&](std::size_t b, std::size_t e) {
            std::size_t h = 0;
            for (std::size_t c = b; c < e; ++c) {
                std::mt19937_64 rng(seed * 0xBF58476D1CE4E5B9ULL + c);
                std::uniform_real_distribution<double> u(-box_half_width, box_half_width);
                std::size_t end = std::min(mc_samples, (c + 1) * chunk);
                for (std::size_t s = c * chunk; s < end; ++s) {
                    Vec x(dim);
                    for (int a = 0; a < dim; ++a) x[a] = u(rng);
                    if (es.contains(x)) ++h;
                }
            }
            return h;
        },
        [](std::size_t a, std::size_t b) { return a + b; }, 1);
    double p = static_cast<double>(hits) / static_cast<double>(mc_samples);
    return {box * p, box * std::sqrt(p * (1.0 - p) / static_cast<double>(mc_samples))};
}

// ---------------------------------------------------------------- I/O

void write_net(std::ostream& os, const DirectionNet& net) {
    os << std::setprecision(17);
    for (const auto& d : net.directions()) {
        os << d.level << ' ' << d.zero_mask;
        for (int i = 0; i < d.vector.size(); ++i) os << ' ' << d.vector[i];
        os << '\n';
    }
}

DirectionNet read_net(std::istream& is, int dim) {
    std::vector<Direction> dirs;
    std::string line;
    int level = -1;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Direction d;
        d.vector = Vec(dim);
        if (!(ls >> d.level >> d.zero_mask)) throw std::runtime_error("read_net: malformed line " + std::to_string(lineno));
        for (int i = 0; i < dim; ++i)
            if (!(ls >> d.vector[i])) throw std::runtime_error("read_net: malformed line " + std::to_string(lineno));
        if (level < 0) level = d.level;
        if (d.level != level) throw std::runtime_error("read_net: mixed levels in one file");
        dirs.push_back(d);
    }
    if (level < 0) throw std::runtime_error("read_net: empty net file");
    return DirectionNet(level, dim, std::move(dirs));
}

}  // namespace fio
