#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>

namespace fio {

using cplx = std::complex<double>;

/// Largest spatial dimension the library supports.
inline constexpr int kMaxDim = 3;

/// Small fixed-capacity real vector for points in R^n, n <= 3.
///
/// Every geometric object in the library lives in dimension 2 or 3, so a
/// stack-allocated value type keeps the hot quadrature loops free of heap
/// traffic.
class Vec {
public:
    Vec() = default;

    explicit Vec(int dim) : n_(dim) {
        if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("Vec: dimension must be in [1,3]");
    }

    Vec(std::initializer_list<double> values) : n_(static_cast<int>(values.size())) {
        if (n_ < 1 || n_ > kMaxDim) throw std::invalid_argument("Vec: dimension must be in [1,3]");
        int i = 0;
        for (double v : values) c_[i++] = v;
    }

    static Vec unit(int dim, int axis) {
        Vec v(dim);
        v[axis] = 1.0;
        return v;
    }

    int size() const { return n_; }

    double& operator[](int i) {
        assert(i >= 0 && i < n_);
        return c_[i];
    }
    double operator[](int i) const {
        assert(i >= 0 && i < n_);
        return c_[i];
    }

    const double* begin() const { return c_.data(); }
    const double* end() const { return c_.data() + n_; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < n_; ++i) c_[i] += o.c_[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < n_; ++i) c_[i] -= o.c_[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n_; ++i) c_[i] *= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator-(Vec a) { return a *= -1.0; }

    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

private:
    int n_ = 0;
    std::array<double, kMaxDim> c_{};
};

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline double max_abs(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

inline Vec normalized(const Vec& a) { return a * (1.0 / norm(a)); }

/// Dense n x n matrix, row-major, n <= 3.
struct Mat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{};

    Mat() = default;
    explicit Mat(int dim) : n(dim) {}

    static Mat identity(int dim) {
        Mat m(dim);
        for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    double& operator()(int r, int c) { return a[r * kMaxDim + c]; }
    double operator()(int r, int c) const { return a[r * kMaxDim + c]; }

    Vec column(int c) const {
        Vec v(n);
        for (int r = 0; r < n; ++r) v[r] = (*this)(r, c);
        return v;
    }

    Mat transpose() const {
        Mat t(n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) t(c, r) = (*this)(r, c);
        return t;
    }
};

inline Vec operator*(const Mat& m, const Vec& v) {
    Vec out(m.n);
    for (int r = 0; r < m.n; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.n; ++c) s += m(r, c) * v[c];
        out[r] = s;
    }
    return out;
}

inline Mat operator*(const Mat& x, const Mat& y) {
    Mat out(x.n);
    for (int r = 0; r < x.n; ++r)
        for (int c = 0; c < x.n; ++c) {
            double s = 0.0;
            for (int k = 0; k < x.n; ++k) s += x(r, k) * y(k, c);
            out(r, c) = s;
        }
    return out;
}

double determinant(const Mat& m);

}  // namespace fio
