#pragma once

// Global error of a linear symplectic recurrence with a constant per-step
// perturbation eta (round-off minus tau times the local truncation error):
//
//   Y_{n+1} = S Y_n + eta
//   Y_n     = S^n [Y_0 - (I - S)^{-1} eta] + (I - S)^{-1} eta
//
// The closed form needs I - S invertible, i.e. tr S != 2 for unimodular S.
//
// Note on the classical statement of this result: it is usually printed with
// the hypotheses "det A < 0 (all continuous solutions bounded)" and
// "|tr S| > 2 (numerical solution stable)". For a trace-free A the bounded
// case is det A > 0, and for unimodular S the bounded case is |tr S| < 2, so
// error_bounded() decides from the spectrum of S directly instead of from
// either printed hypothesis.

#include <cmath>
#include <cstdint>
#include <string>

#include "symbound/analyzer.hpp"
#include "symbound/error.hpp"
#include "symbound/mat2.hpp"

namespace symbound {

struct ErrorModel {
  Mat2 S;
  Vec2 eta;
  Vec2 y0;
};

inline constexpr double kResolventTolerance = 1e-12;

inline ErrorModel make_error_model(const Mat2& s, Vec2 eta, Vec2 y0) {
  require_unimodular(s);
  return {s, eta, y0};
}

/// n applications of Y <- S Y + eta.
inline Vec2 iterate_error(const ErrorModel& m, std::uint64_t n) {
  Vec2 y = m.y0;
  for (std::uint64_t k = 0; k < n; ++k) y = m.S * y + m.eta;
  return y;
}

/// Fixed point c = (I - S)^{-1} eta of the recurrence.
inline Vec2 resolvent_offset(const ErrorModel& m) {
  const Mat2 i_minus_s = Mat2::identity() - m.S;
  if (std::abs(i_minus_s.det()) <= kResolventTolerance) {
    throw Error(ErrorCode::SingularResolvent,
                "I - S is singular (tr S = " + detail::format_real(m.S.trace()) + "); iterate instead");
  }
  return i_minus_s.inverse() * m.eta;
}

inline Vec2 closed_form_error(const ErrorModel& m, std::uint64_t n) {
  const Vec2 c = resolvent_offset(m);
  return matrix_power(m.S, n) * (m.y0 - c) + c;
}

struct BoundednessResult {
  bool bounded = false;
  std::string explanation;
};

/// sup_n |Y_n| < inf, decided from the structure of S and Y_0 - c.
inline BoundednessResult error_bounded(const ErrorModel& m) {
  const Vec2 c = resolvent_offset(m);
  const Vec2 w = m.y0 - c;
  const double tr = m.S.trace();
  const double margin = std::abs(tr) - 2.0;
  if (margin < -kBoundaryTolerance) {
    return {true, "elliptic: |tr S| < 2, S^n is conjugate to a rotation"};
  }
  if (margin > kBoundaryTolerance) {
    const auto ev = real_eigenvalues(m.S);
    const double lo = (*ev)[0], hi = (*ev)[1];
    const double expanding = std::abs(lo) > std::abs(hi) ? lo : hi;
    const double contracting = std::abs(lo) > std::abs(hi) ? hi : lo;
    // w = a u_expanding + b u_contracting; a is the coefficient that grows
    const Vec2 ue = eigenvector(m.S, expanding);
    const Vec2 uc = eigenvector(m.S, contracting);
    const double cross = ue.x * uc.y - ue.y * uc.x;
    const double a = (w.x * uc.y - w.y * uc.x) / cross;
    if (std::abs(a) <= 1e-12 * std::max(1.0, w.norm())) {
      return {true, "hyperbolic: Y0 - c lies on the contracting eigenline"};
    }
    return {false, "hyperbolic: Y0 - c has an expanding component (|lambda| = " +
                       detail::format_real(std::abs(expanding)) + ")"};
  }
  // tr S = -2 (tr S = 2 was rejected by the resolvent)
  const Mat2 shear = m.S + Mat2::identity();
  if (shear.norm_max() <= kBoundaryTolerance) return {true, "S = -I: Y_n alternates about c"};
  const Vec2 k = kernel_direction(shear);
  if (direction_gap(k, w) <= 1e-12 || w.norm() == 0.0) {
    return {true, "parabolic (tr S = -2): Y0 - c lies on the fixed line of S + I"};
  }
  return {false, "parabolic (tr S = -2): Y_n grows linearly off the fixed line"};
}

/// For elliptic S: the bound |Y0 - c| kappa + |c| on every |Y_n|, with kappa
/// the condition number of the real basis in which S is a rotation.
inline double elliptic_error_bound(const ErrorModel& m) {
  const double half_tr = 0.5 * m.S.trace();
  const double s = std::sqrt(std::max(0.0, 1.0 - half_tr * half_tr));
  if (!(s > 0.0)) throw Error(ErrorCode::NotApplicable, "elliptic_error_bound needs |tr S| < 2");
  // S = half_tr I + s K with K^2 = -I; in basis P = [e1, K e1], S is a rotation
  const Mat2 k = (1.0 / s) * (m.S - half_tr * Mat2::identity());
  const Mat2 p{1.0, k.a11, 0.0, k.a21};
  // singular values of a 2x2 matrix
  const double f2 = p.a11 * p.a11 + p.a12 * p.a12 + p.a21 * p.a21 + p.a22 * p.a22;
  const double d = std::abs(p.det());
  const double root = std::sqrt(std::max(0.0, f2 * f2 - 4.0 * d * d));
  const double smax = std::sqrt(0.5 * (f2 + root));
  const double smin = d / smax;
  const double kappa = smax / smin;
  const Vec2 c = resolvent_offset(m);
  return (m.y0 - c).norm() * kappa + c.norm();
}

}  // namespace symbound
