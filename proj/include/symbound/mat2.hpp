#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "symbound/expr.hpp"

namespace symbound {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  double norm_max() const { return std::max(std::abs(x), std::abs(y)); }
};

/// Unit vector in the direction of v with the first nonzero component positive.
inline Vec2 canonical_direction(Vec2 v) {
  const double n = v.norm();
  if (n == 0.0) return v;
  Vec2 u{v.x / n, v.y / n};
  if (u.x < 0.0 || (u.x == 0.0 && u.y < 0.0)) u = -1.0 * u;
  return u;
}

/// |sin| of the angle between two nonzero vectors.
inline double direction_gap(Vec2 a, Vec2 b) {
  return std::abs(a.x * b.y - a.y * b.x) / (a.norm() * b.norm());
}

/// Real 2x2 matrix, row-major: [[a11, a12], [a21, a22]].
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Mat2 zero() { return {}; }

  double trace() const { return a11 + a22; }
  double det() const { return a11 * a22 - a12 * a21; }

  /// Magnitude of the products entering det(); the natural rounding scale of det().
  double det_scale() const { return std::abs(a11 * a22) + std::abs(a12 * a21); }

  double norm_max() const {
    return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
  }
  double norm_frobenius() const { return std::sqrt(a11 * a11 + a12 * a12 + a21 * a21 + a22 * a22); }

  /// Numerical rank with absolute tolerance `tol` on entries and a scale-aware
  /// test on the determinant.
  int rank(double tol = 1e-9) const {
    if (norm_max() <= tol) return 0;
    if (std::abs(det()) <= tol * (1.0 + det_scale())) return 1;
    return 2;
  }

  Mat2 transpose() const { return {a11, a21, a12, a22}; }

  /// Throws nothing; callers check det() first.
  Mat2 inverse() const {
    const double d = det();
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  friend Mat2 operator+(const Mat2& a, const Mat2& b) {
    return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
  }
  friend Mat2 operator-(const Mat2& a, const Mat2& b) {
    return {a.a11 - b.a11, a.a12 - b.a12, a.a21 - b.a21, a.a22 - b.a22};
  }
  friend Mat2 operator*(double s, const Mat2& a) { return {s * a.a11, s * a.a12, s * a.a21, s * a.a22}; }
  friend Mat2 operator*(const Mat2& a, const Mat2& b) {
    return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
            a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
  }
  friend Vec2 operator*(const Mat2& a, Vec2 v) {
    return {a.a11 * v.x + a.a12 * v.y, a.a21 * v.x + a.a22 * v.y};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

/// S^n by binary exponentiation.
inline Mat2 matrix_power(Mat2 s, std::uint64_t n) {
  Mat2 result = Mat2::identity();
  while (n > 0) {
    if (n & 1U) result = result * s;
    s = s * s;
    n >>= 1U;
  }
  return result;
}

/// Relative distance of det(S) from 1, normalised by the rounding scale of
/// the determinant so that propagators with large entries are judged fairly.
inline double unimodular_defect(const Mat2& s) {
  return std::abs(s.det() - 1.0) / std::max(1.0, s.det_scale());
}

/// A nonzero vector spanning the kernel of a rank-1 matrix: orthogonal to its
/// dominant row.
inline Vec2 kernel_direction(const Mat2& m) {
  const Vec2 r1{m.a11, m.a12};
  const Vec2 r2{m.a21, m.a22};
  const Vec2 r = r1.norm() >= r2.norm() ? r1 : r2;
  return canonical_direction({-r.y, r.x});
}

/// Eigenvector of m for the real eigenvalue `lambda`: kernel of (m - lambda I).
inline Vec2 eigenvector(const Mat2& m, double lambda) {
  return kernel_direction(m - lambda * Mat2::identity());
}

/// Real eigenvalues in ascending order, if the characteristic polynomial has them.
inline std::optional<std::array<double, 2>> real_eigenvalues(const Mat2& m) {
  const double half_tr = 0.5 * m.trace();
  const double disc = half_tr * half_tr - m.det();
  if (disc < 0.0) return std::nullopt;
  const double root = std::sqrt(disc);
  // avoid cancellation in the smaller-magnitude root
  const double big = half_tr >= 0.0 ? half_tr + root : half_tr - root;
  const double small = big != 0.0 ? m.det() / big : 0.0;
  return std::array<double, 2>{std::min(big, small), std::max(big, small)};
}

inline std::string to_string(const Mat2& m) {
  return "[[" + detail::format_real(m.a11) + ", " + detail::format_real(m.a12) + "], [" +
         detail::format_real(m.a21) + ", " + detail::format_real(m.a22) + "]]";
}

}  // namespace symbound
