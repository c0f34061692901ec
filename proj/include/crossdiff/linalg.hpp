#pragma once

#include <array>
#include <cmath>

namespace crossdiff {

/// 2-component state vector (u1, u2); also used for kernel vectors and
/// expansion coefficients.
struct Vec2 {
    double v1 = 0.0;
    double v2 = 0.0;

    double& operator[](int i) { return i == 0 ? v1 : v2; }
    double operator[](int i) const { return i == 0 ? v1 : v2; }

    Vec2 operator+(const Vec2& o) const { return {v1 + o.v1, v2 + o.v2}; }
    Vec2 operator-(const Vec2& o) const { return {v1 - o.v1, v2 - o.v2}; }
    Vec2 operator*(double s) const { return {v1 * s, v2 * s}; }
    Vec2 operator-() const { return {-v1, -v2}; }

    double dot(const Vec2& o) const { return v1 * o.v1 + v2 * o.v2; }
    double norm() const { return std::sqrt(v1 * v1 + v2 * v2); }
    double norm_inf() const { return std::max(std::abs(v1), std::abs(v2)); }
    bool finite() const { return std::isfinite(v1) && std::isfinite(v2); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Dense 2x2 matrix, row-major.
struct Mat2 {
    double a11 = 0.0, a12 = 0.0;
    double a21 = 0.0, a22 = 0.0;

    double det() const { return a11 * a22 - a12 * a21; }
    double trace() const { return a11 + a22; }
    double norm_fro() const {
        return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22);
    }
    Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Vec2 operator*(const Vec2& v) const {
        return {a11 * v.v1 + a12 * v.v2, a21 * v.v1 + a22 * v.v2};
    }
    Mat2 operator+(const Mat2& o) const {
        return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
    }
    Mat2 operator-(const Mat2& o) const {
        return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    bool finite() const {
        return std::isfinite(a11) && std::isfinite(a12) && std::isfinite(a21) &&
               std::isfinite(a22);
    }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

/// Solves A x = b by Cramer's rule. The caller guards against |det A| ~ 0.
inline Vec2 solve2(const Mat2& a, const Vec2& b) {
    const double d = a.det();
    return {(b.v1 * a.a22 - b.v2 * a.a12) / d, (a.a11 * b.v2 - a.a21 * b.v1) / d};
}

/// Largest real part among the eigenvalues of a real 2x2 matrix.
inline double max_real_eigenvalue(const Mat2& a) {
    const double tr = a.trace();
    const double disc = tr * tr - 4.0 * a.det();
    if (disc >= 0.0) return 0.5 * (tr + std::sqrt(disc));
    return 0.5 * tr;
}

}  // namespace crossdiff
