#include "fio/numerics.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace fio {

double determinant(const Mat& m) {
    Eigen::Matrix3d e = Eigen::Matrix3d::Identity();
    for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c) e(r, c) = m(r, c);
    return e.determinant();
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

Grid::Grid(int dim, double half_width, std::size_t points_per_axis)
    : dim_(dim), half_width_(half_width), n_axis_(points_per_axis) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Grid: dimension must be in [1,3]");
    if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
    if (points_per_axis == 0) throw std::invalid_argument("Grid: empty grid");
    h_ = 2.0 * half_width_ / static_cast<double>(n_axis_);
    total_ = 1;
    for (int i = 0; i < dim_; ++i) total_ *= n_axis_;
    weight_ = std::pow(h_, dim_);
}

std::array<std::size_t, kMaxDim> Grid::unflatten(std::size_t flat) const {
    std::array<std::size_t, kMaxDim> idx{};
    for (int a = dim_ - 1; a >= 0; --a) {
        idx[a] = flat % n_axis_;
        flat /= n_axis_;
    }
    return idx;
}

std::size_t Grid::flatten(const std::array<std::size_t, kMaxDim>& idx) const {
    std::size_t flat = 0;
    for (int a = 0; a < dim_; ++a) flat = flat * n_axis_ + idx[a];
    return flat;
}

Vec Grid::point(std::size_t flat) const {
    auto idx = unflatten(flat);
    Vec p(dim_);
    for (int a = 0; a < dim_; ++a) p[a] = axis_coord(idx[a]);
    return p;
}

Grid Grid::dual() const {
    // spacing 1/(2L) with N points centred on zero: half width N/(4L)
    return Grid(dim_, static_cast<double>(n_axis_) / (4.0 * half_width_), n_axis_);
}

MultiIndex::MultiIndex(std::initializer_list<int> comps) : n(static_cast<int>(comps.size())) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("MultiIndex: dimension must be in [1,3]");
    int i = 0;
    for (int v : comps) {
        if (v < 0) throw std::invalid_argument("MultiIndex: negative component");
        c[i++] = v;
    }
}

std::vector<MultiIndex> multi_indices_up_to(int n, int max_order) {
    std::vector<MultiIndex> out;
    for (int ord = 0; ord <= max_order; ++ord) {
        MultiIndex a(n);
        // enumerate compositions of ord into n parts, lexicographically descending in a[0]
        std::function<void(int, int)> rec = [&](int axis, int left) {
            if (axis == n - 1) {
                a[axis] = left;
                out.push_back(a);
                return;
            }
            for (int v = left; v >= 0; --v) {
                a[axis] = v;
                rec(axis + 1, left - v);
            }
        };
        rec(0, ord);
    }
    return out;
}

template <typename T>
static T midpoint_sum(std::span<const T> samples, const Grid& grid) {
    if (grid.size() == 0 || samples.empty()) throw std::invalid_argument("quadrature_integral: empty grid");
    if (samples.size() != grid.size()) throw std::invalid_argument("quadrature_integral: sample count does not match grid");
    CompensatedSum<T> acc;
    for (const T& v : samples) acc.add(v);
    return acc.value() * grid.weight();
}

cplx quadrature_integral(std::span<const cplx> samples, const Grid& grid) { return midpoint_sum(samples, grid); }
double quadrature_integral(std::span<const double> samples, const Grid& grid) { return midpoint_sum(samples, grid); }

namespace {

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

void fftw_cube(std::vector<cplx>& data, int dim, std::size_t n_axis, int sign) {
    fft_inplace(data, std::vector<int>(dim, static_cast<int>(n_axis)), sign);
}

// (-1)^(sum of indices) checkerboard, the factor that moves the grid origin to -L / -N/(4L).
double checker(const Grid& g, std::size_t flat) {
    auto idx = g.unflatten(flat);
    std::size_t s = 0;
    for (int a = 0; a < g.dim(); ++a) s += idx[a];
    return (s & 1U) ? -1.0 : 1.0;
}

std::vector<cplx> transform(std::span<const cplx> in, const Grid& grid, int sign, double scale) {
    if (!is_power_of_two(grid.points_per_axis()))
        throw std::invalid_argument("dft: points per axis must be a power of two");
    if (in.size() != grid.size()) throw std::invalid_argument("dft: sample count does not match grid");
    std::vector<cplx> data(in.begin(), in.end());
    for (std::size_t p = 0; p < data.size(); ++p) data[p] *= checker(grid, p);
    fftw_cube(data, grid.dim(), grid.points_per_axis(), sign);
    // (-1)^{N/2} per axis
    double global = ((grid.points_per_axis() / 2) % 2 == 1 && grid.dim() % 2 == 1) ? -1.0 : 1.0;
    for (std::size_t k = 0; k < data.size(); ++k) data[k] *= checker(grid, k) * global * scale;
    return data;
}

}  // namespace

std::vector<cplx> dft(std::span<const cplx> samples, const Grid& grid) {
    return transform(samples, grid, FFTW_FORWARD, grid.weight());
}

std::vector<cplx> idft(std::span<const cplx> spectrum, const Grid& grid) {
    return transform(spectrum, grid, FFTW_BACKWARD, grid.dual().weight());
}

void fft_inplace(std::vector<cplx>& data, const std::vector<int>& extents, int sign) {
    std::size_t total = 1;
    for (int e : extents) total *= static_cast<std::size_t>(e);
    if (total != data.size()) throw std::invalid_argument("fft_inplace: extents do not match data size");
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(extents.size()), extents.data(), buf, buf,
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fftw: plan creation failed");
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan);
}

double default_fd_step(const Vec& point) { return std::max(1e-3, 1e-3 * norm(point)); }

namespace {

struct Stencil {
    std::vector<int> offsets;
    std::vector<double> weights;  // divided by step^order later
};

const Stencil& central_stencil(int order) {
    static const std::array<Stencil, 5> table = {
        Stencil{{0}, {1.0}},
        Stencil{{-1, 1}, {-0.5, 0.5}},
        Stencil{{-1, 0, 1}, {1.0, -2.0, 1.0}},
        Stencil{{-2, -1, 1, 2}, {-0.5, 1.0, -1.0, 0.5}},
        Stencil{{-2, -1, 0, 1, 2}, {1.0, -4.0, 6.0, -4.0, 1.0}},
    };
    return table[order];
}

double nested_difference(const ScalarField& f, Vec& p, const MultiIndex& alpha, double step, int axis) {
    if (axis == alpha.n) return f(p);
    int ord = alpha[axis];
    if (ord == 0) return nested_difference(f, p, alpha, step, axis + 1);
    const Stencil& st = central_stencil(ord);
    double centre = p[axis];
    double acc = 0.0;
    for (std::size_t k = 0; k < st.offsets.size(); ++k) {
        p[axis] = centre + st.offsets[k] * step;
        acc += st.weights[k] * nested_difference(f, p, alpha, step, axis + 1);
    }
    p[axis] = centre;
    return acc / std::pow(step, ord);
}

}  // namespace

double finite_difference(const ScalarField& f, const Vec& point, const MultiIndex& alpha, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference: step must be positive");
    if (alpha.n != point.size()) throw std::invalid_argument("finite_difference: multi-index dimension mismatch");
    if (alpha.order() > 4) throw std::invalid_argument("finite_difference: |alpha| must be <= 4");
    Vec p = point;
    return nested_difference(f, p, alpha, step, 0);
}

FitResult fit_log2_slope_real(std::span<const std::pair<double, double>> pairs) {
    if (pairs.size() < 3) throw std::invalid_argument("fit_log2_slope: need at least 3 pairs");
    double sx = 0, sy = 0;
    std::vector<double> ys;
    ys.reserve(pairs.size());
    for (auto [x, v] : pairs) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("fit_log2_slope: values must be positive");
        ys.push_back(std::log2(v));
        sx += x;
        sy += ys.back();
    }
    double n = static_cast<double>(pairs.size());
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        double dx = pairs[i].first - mx;
        sxx += dx * dx;
        sxy += dx * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("fit_log2_slope: abscissae must not all coincide");
    FitResult r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        r.residual = std::max(r.residual, std::abs(ys[i] - (r.intercept + r.slope * pairs[i].first)));
    return r;
}

FitResult fit_log2_slope(std::span<const std::pair<int, double>> pairs) {
    std::vector<std::pair<double, double>> real;
    real.reserve(pairs.size());
    for (auto [j, v] : pairs) real.emplace_back(static_cast<double>(j), v);
    return fit_log2_slope_real(real);
}

}  // namespace fio
