#pragma once

// Symplectic one-step methods and their linear propagators S(tau).
//
//   euler-b            kick p with V'(q), then drift q with T'(P)
//   yoshida2           half drift, full kick, half drift (order-2 leapfrog)
//   stormer-verlet     half kick, drift, half kick on dp/dt = g(q), dq/dt = p
//   implicit-midpoint  P = p - tau H_q(m), Q = q + tau H_p(m), m the midpoint
//                      (sometimes called the "implicit Euler scheme" in the
//                      boundedness literature; it is the midpoint rule)
//
// Propagators are composed from the stage matrices of each method applied to
// the linear system dy/dt = A y, never obtained by differencing.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "symbound/error.hpp"
#include "symbound/mat2.hpp"
#include "symbound/systems.hpp"

namespace symbound {

enum class SchemeKind { EulerB, Yoshida2, StormerVerlet, ImplicitMidpoint };

inline constexpr std::array<SchemeKind, 4> kAllSchemes = {SchemeKind::EulerB, SchemeKind::Yoshida2,
                                                          SchemeKind::StormerVerlet, SchemeKind::ImplicitMidpoint};

constexpr std::string_view to_string(SchemeKind s) {
  switch (s) {
    case SchemeKind::EulerB: return "euler-b";
    case SchemeKind::Yoshida2: return "yoshida2";
    case SchemeKind::StormerVerlet: return "stormer-verlet";
    case SchemeKind::ImplicitMidpoint: return "implicit-midpoint";
  }
  return "?";
}

inline std::optional<SchemeKind> scheme_from_name(std::string_view name) {
  for (SchemeKind s : kAllSchemes) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

/// euler-b and yoshida2 need a separable splitting (Newtonian systems reduce
/// to one); stormer-verlet is written for Newtonian systems; the midpoint rule
/// takes any Hamiltonian.
constexpr bool applicable(SchemeKind s, SystemClass c) {
  switch (s) {
    case SchemeKind::EulerB:
    case SchemeKind::Yoshida2: return c != SystemClass::General;
    case SchemeKind::StormerVerlet: return c == SystemClass::Newtonian;
    case SchemeKind::ImplicitMidpoint: return true;
  }
  return false;
}

inline void require_applicable(SchemeKind s, SystemClass c) {
  if (!applicable(s, c)) {
    throw Error(ErrorCode::NotApplicable,
                "scheme " + std::string(to_string(s)) + " does not apply to a " + std::string(to_string(c)) + " system");
  }
}

/// |det(I - tau A / 2)| below this (relative to its rounding scale) makes the
/// midpoint rule's linear solve singular.
inline constexpr double kCayleyTolerance = 1e-8;

namespace detail {

inline State implicit_midpoint_step(const HamiltonianSystem& sys, const State& x, double tau) {
  auto residual = [&](const State& z) -> Vec2 {
    const State m{0.5 * (x.p + z.p), 0.5 * (x.q + z.q)};
    return {z.p - x.p + tau * sys.dH_dq(m), z.q - x.q - tau * sys.dH_dp(m)};
  };
  auto fail = [&](const std::string& why) -> Error {
    return Error(ErrorCode::ImplicitSolveFailed, "implicit-midpoint at tau=" + format_real(tau) + ": " + why);
  };

  State z = x;
  Vec2 r = residual(z);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    // a singular Newton matrix means the solution is not isolated, even if
    // the current iterate already satisfies the residual test
    const State m{0.5 * (x.p + z.p), 0.5 * (x.q + z.q)};
    const Mat2 newton = Mat2::identity() - (0.5 * tau) * sys.jacobian(m);
    if (std::abs(newton.det()) <= kCayleyTolerance * std::max(1.0, newton.det_scale())) {
      throw fail("singular Newton matrix");
    }
    const double tol = 1e-12 * (1.0 + z.norm());
    if (r.norm() <= tol) {
      converged = true;
      break;
    }
    Vec2 dz = -1.0 * (newton.inverse() * r);
    bool accepted = false;
    for (int halving = 0; halving < 20; ++halving) {
      const State trial{z.p + dz.x, z.q + dz.y};
      const Vec2 rt = residual(trial);
      if (std::isfinite(rt.x) && std::isfinite(rt.y) && rt.norm() < r.norm()) {
        z = trial;
        r = rt;
        accepted = true;
        break;
      }
      dz = 0.5 * dz;
    }
    if (!accepted) break;
  }
  if (!converged) throw fail("Newton iteration did not converge");

  // one polishing step so finite-difference Jacobians of the map see
  // round-off rather than the solver tolerance
  if (r.norm() > 0.0) {
    const State m{0.5 * (x.p + z.p), 0.5 * (x.q + z.q)};
    const Mat2 newton = Mat2::identity() - (0.5 * tau) * sys.jacobian(m);
    const Vec2 dz = -1.0 * (newton.inverse() * r);
    const State trial{z.p + dz.x, z.q + dz.y};
    if (residual(trial).norm() <= r.norm()) z = trial;
  }
  return z;
}

}  // namespace detail

/// One step of size tau from x.
inline State step(SchemeKind scheme, const HamiltonianSystem& sys, const State& x, double tau) {
  require_applicable(scheme, sys.system_class());
  switch (scheme) {
    case SchemeKind::EulerB: {
      const SeparableView s = sys.separable_view();
      const double p_new = x.p - tau * eval_pq(s.dV, x.p, x.q);
      const double q_new = x.q + tau * eval_pq(s.dT, p_new, x.q);
      return {p_new, q_new};
    }
    case SchemeKind::Yoshida2: {
      const SeparableView s = sys.separable_view();
      const double q_half = x.q + 0.5 * tau * eval_pq(s.dT, x.p, x.q);
      const double p_new = x.p - tau * eval_pq(s.dV, x.p, q_half);
      const double q_new = q_half + 0.5 * tau * eval_pq(s.dT, p_new, q_half);
      return {p_new, q_new};
    }
    case SchemeKind::StormerVerlet: {
      const Expr& g = *sys.force_expr();
      const double p_half = x.p + 0.5 * tau * eval_pq(g, x.p, x.q);
      const double q_new = x.q + tau * p_half;
      const double p_new = p_half + 0.5 * tau * eval_pq(g, p_half, q_new);
      return {p_new, q_new};
    }
    case SchemeKind::ImplicitMidpoint: return detail::implicit_midpoint_step(sys, x, tau);
  }
  return x;
}

struct Propagator {
  Mat2 S;
  double tau = 0.0;
  SchemeKind scheme = SchemeKind::EulerB;
};

namespace detail {

/// Linearised kick p += tau * c * q.
inline Mat2 kick(double c) { return {1.0, c, 0.0, 1.0}; }
/// Linearised drift q += tau * c * p.
inline Mat2 drift(double c) { return {1.0, 0.0, c, 1.0}; }

}  // namespace detail

/// Closed-form S(tau) for `scheme` applied to dy/dt = A y. Explicit schemes
/// require the separable shape A = [[0, -v], [t, 0]].
inline Propagator propagator(SchemeKind scheme, const Mat2& a, double tau) {
  if (std::abs(a.trace()) > kTraceTolerance * std::max(1.0, a.norm_max())) {
    throw Error(ErrorCode::NotTraceFree, "propagator needs a trace-free matrix, got " + to_string(a));
  }
  Propagator out{Mat2::identity(), tau, scheme};
  if (scheme == SchemeKind::ImplicitMidpoint) {
    const Mat2 lhs = Mat2::identity() - (0.5 * tau) * a;
    if (std::abs(lhs.det()) <= kCayleyTolerance * std::max(1.0, lhs.det_scale())) {
      throw Error(ErrorCode::SingularCayley, "I - tau A/2 is singular at tau=" + detail::format_real(tau));
    }
    out.S = lhs.inverse() * (Mat2::identity() + (0.5 * tau) * a);
    return out;
  }

  if (std::abs(a.a11) > kTraceTolerance * std::max(1.0, a.norm_max())) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(to_string(scheme)) + " needs a separable linearization, got " + to_string(a));
  }
  const double t = a.a21;   // T''(p0)
  const double v = -a.a12;  // V''(q0), equals -g'(q0) for Newtonian systems
  switch (scheme) {
    case SchemeKind::EulerB: out.S = detail::drift(tau * t) * detail::kick(-tau * v); break;
    case SchemeKind::Yoshida2:
      out.S = detail::drift(0.5 * tau * t) * detail::kick(-tau * v) * detail::drift(0.5 * tau * t);
      break;
    case SchemeKind::StormerVerlet:
      out.S = detail::kick(-0.5 * tau * v) * detail::drift(tau * t) * detail::kick(-0.5 * tau * v);
      break;
    case SchemeKind::ImplicitMidpoint: break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference checks on the nonlinear one-step map

/// Central-difference Jacobian d(P, Q)/d(p, q) of an arbitrary one-step map.
template <class StepMap>
Mat2 one_step_jacobian(StepMap&& map, const State& x, double h) {
  const State pp = map(State{x.p + h, x.q});
  const State pm = map(State{x.p - h, x.q});
  const State qp = map(State{x.p, x.q + h});
  const State qm = map(State{x.p, x.q - h});
  const double s = 0.5 / h;
  return {(pp.p - pm.p) * s, (qp.p - qm.p) * s, (pp.q - pm.q) * s, (qp.q - qm.q) * s};
}

/// max-norm of M^T J M - J, J = [[0, 1], [-1, 0]]; equals |det M - 1| for 2x2 maps.
inline double symplectic_form_defect(const Mat2& m) {
  const Mat2 j{0.0, 1.0, -1.0, 0.0};
  return (m.transpose() * j * m - j).norm_max();
}

template <class StepMap>
double symplecticity_defect_of(StepMap&& map, const State& x, double h) {
  return symplectic_form_defect(one_step_jacobian(map, x, h));
}

inline double symplecticity_defect(SchemeKind scheme, const HamiltonianSystem& sys, const State& x, double tau,
                                   double h = 1e-5) {
  return symplecticity_defect_of([&](const State& s) { return step(scheme, sys, s, tau); }, x, h);
}

/// max-norm gap between the closed-form propagator and the differenced step map at an equilibrium.
inline double propagator_matches_linearization(SchemeKind scheme, const HamiltonianSystem& sys,
                                               const Equilibrium& eq, double tau, double h = 1e-5) {
  const Mat2 closed = propagator(scheme, eq.A, tau).S;
  const Mat2 fd = one_step_jacobian([&](const State& s) { return step(scheme, sys, s, tau); }, eq.point, h);
  return (closed - fd).norm_max();
}

}  // namespace symbound
