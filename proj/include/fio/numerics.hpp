#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include "fio/vec.hpp"

namespace fio {

/// Uniform tensor-product grid on [-L, L)^n with N points per axis.
///
/// Points are x_i = -L + i*h along each axis (h = 2L/N), stored row-major
/// with the last axis fastest.  Every point carries the midpoint-rule
/// weight h^n.
class Grid {
public:
    Grid(int dim, double half_width, std::size_t points_per_axis);

    int dim() const { return dim_; }
    double half_width() const { return half_width_; }
    std::size_t points_per_axis() const { return n_axis_; }
    double spacing() const { return h_; }
    std::size_t size() const { return total_; }
    double weight() const { return weight_; }

    double axis_coord(std::size_t i) const { return -half_width_ + static_cast<double>(i) * h_; }
    Vec point(std::size_t flat) const;
    std::array<std::size_t, kMaxDim> unflatten(std::size_t flat) const;
    std::size_t flatten(const std::array<std::size_t, kMaxDim>& idx) const;

    /// Frequency grid paired with this grid by the discrete transform:
    /// spacing 1/(2L), same point count, xi_k = (k - N/2)/(2L).
    Grid dual() const;

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.dim_ == b.dim_ && a.half_width_ == b.half_width_ && a.n_axis_ == b.n_axis_;
    }

private:
    int dim_;
    double half_width_;
    std::size_t n_axis_;
    double h_;
    std::size_t total_;
    double weight_;
};

/// Multi-index alpha = (alpha_1, ..., alpha_n) of non-negative integers.
struct MultiIndex {
    int n = 0;
    std::array<int, kMaxDim> c{};

    MultiIndex() = default;
    explicit MultiIndex(int dim) : n(dim) {}
    MultiIndex(std::initializer_list<int> comps);

    int order() const {
        int s = 0;
        for (int i = 0; i < n; ++i) s += c[i];
        return s;
    }
    int operator[](int i) const { return c[i]; }
    int& operator[](int i) { return c[i]; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
        if (a.n != b.n) return false;
        for (int i = 0; i < a.n; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
};

/// All multi-indices in dimension n with |alpha| <= max_order, graded by order.
std::vector<MultiIndex> multi_indices_up_to(int n, int max_order);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;  // max |log2 value - fitted line|
};

/// Neumaier compensated accumulator.
template <typename T>
class CompensatedSum {
public:
    void add(T v) {
        T t = sum_ + v;
        if constexpr (std::is_same_v<T, cplx>) {
            comp_ += cplx(compensate(sum_.real(), v.real(), t.real()), compensate(sum_.imag(), v.imag(), t.imag()));
        } else {
            comp_ += compensate(sum_, v, t);
        }
        sum_ = t;
    }
    T value() const { return sum_ + comp_; }

private:
    static double compensate(double s, double v, double t) {
        return std::abs(s) >= std::abs(v) ? (s - t) + v : (v - t) + s;
    }
    T sum_{};
    T comp_{};
};

/// Midpoint rule: h^n * sum of samples.
cplx quadrature_integral(std::span<const cplx> samples, const Grid& grid);
double quadrature_integral(std::span<const double> samples, const Grid& grid);

/// Riemann-sum approximation of  f^(xi) = int f(x) e^{-2 pi i x.xi} dx  on grid.dual().
/// N must be a power of two.
std::vector<cplx> dft(std::span<const cplx> samples, const Grid& grid);

/// Inverse of dft: samples on grid.dual() mapped back to grid,
/// f(x) = sum f^(xi) e^{2 pi i x.xi} dxi^n.
std::vector<cplx> idft(std::span<const cplx> spectrum, const Grid& grid);

/// Unnormalised in-place FFT of a row-major array with the given extents
/// (sign -1 forward, +1 backward, as in FFTW).  Plan creation is serialised.
void fft_inplace(std::vector<cplx>& data, const std::vector<int>& extents, int sign);

using ScalarField = std::function<double(const Vec&)>;

/// Default finite-difference step max(1e-3, 1e-3 |point|).
double default_fd_step(const Vec& point);

/// Central-difference estimate of d^alpha f at point, |alpha| <= 4, mixed
/// indices handled by a tensor product of one-axis stencils.  O(step^2).
double finite_difference(const ScalarField& f, const Vec& point, const MultiIndex& alpha, double step);

/// Least-squares line through (j, log2 value).
FitResult fit_log2_slope(std::span<const std::pair<int, double>> pairs);

/// Least-squares line through arbitrary (x, log2 value) pairs; used when the
/// abscissa is itself a log2 quantity.
FitResult fit_log2_slope_real(std::span<const std::pair<double, double>> pairs);

bool is_power_of_two(std::size_t n);

}  // namespace fio
