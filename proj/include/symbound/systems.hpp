#pragma once

// One-degree-of-freedom Hamiltonian systems in three classes:
//   General    dp/dt = -H_q(p,q),  dq/dt = H_p(p,q)
//   Separable  H = T(p) + V(q)
//   Newtonian  dp/dt = g(q),       dq/dt = p
// All derivative trees are built once, symbolically, at construction.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "symbound/error.hpp"
#include "symbound/expr.hpp"
#include "symbound/mat2.hpp"
#include "symbound/parse.hpp"

namespace symbound {

enum class SystemClass { General, Separable, Newtonian };

constexpr std::string_view to_string(SystemClass c) {
  switch (c) {
    case SystemClass::General: return "general";
    case SystemClass::Separable: return "separable";
    case SystemClass::Newtonian: return "newtonian";
  }
  return "?";
}

struct State {
  double p = 0.0;
  double q = 0.0;

  double norm() const { return std::hypot(p, q); }
  Vec2 vec() const { return {p, q}; }
  static State from(Vec2 v) { return {v.x, v.y}; }
  friend bool operator==(const State&, const State&) = default;
};

inline double distance(const State& a, const State& b) { return std::hypot(a.p - b.p, a.q - b.q); }

/// Right-hand side (dp/dt, dq/dt).
struct VectorField {
  double dp = 0.0;
  double dq = 0.0;
  double norm() const { return std::hypot(dp, dq); }
};

/// Kick/drift derivatives of a separable system: T'(p), T''(p), V'(q), V''(q).
/// Newtonian systems expose T = p^2/2 and V' = -g.
struct SeparableView {
  Expr dT, d2T, dV, d2V;
};

class HamiltonianSystem {
 public:
  static HamiltonianSystem general(Expr hamiltonian) {
    HamiltonianSystem s(SystemClass::General);
    s.h_ = hamiltonian;
    s.hp_ = differentiate(hamiltonian, "p");
    s.hq_ = differentiate(hamiltonian, "q");
    s.hpp_ = differentiate(s.hp_, "p");
    s.hpq_ = differentiate(s.hp_, "q");
    s.hqq_ = differentiate(s.hq_, "q");
    return s;
  }

  static HamiltonianSystem separable(Expr kinetic, Expr potential) {
    require_only(kinetic, "p", "T");
    require_only(potential, "q", "V");
    HamiltonianSystem s(SystemClass::Separable);
    s.t_ = kinetic;
    s.v_ = potential;
    s.h_ = simplify(kinetic + potential);
    s.hp_ = differentiate(kinetic, "p");
    s.hq_ = differentiate(potential, "q");
    s.hpp_ = differentiate(s.hp_, "p");
    s.hqq_ = differentiate(s.hq_, "q");
    s.hpq_ = Expr::constant(0.0);
    return s;
  }

  static HamiltonianSystem newtonian(Expr force) {
    require_only(force, "q", "g");
    HamiltonianSystem s(SystemClass::Newtonian);
    s.g_ = force;
    s.dg_ = differentiate(force, "q");
    s.hp_ = Expr::variable("p");
    s.hq_ = simplify(-force);
    s.hpp_ = Expr::constant(1.0);
    s.hpq_ = Expr::constant(0.0);
    s.hqq_ = simplify(-s.dg_);
    return s;
  }

  static HamiltonianSystem general(std::string_view h) { return general(symbound::parse(h, {"p", "q"})); }
  static HamiltonianSystem separable(std::string_view t, std::string_view v) {
    return separable(symbound::parse(t, {"p"}), symbound::parse(v, {"q"}));
  }
  static HamiltonianSystem newtonian(std::string_view g) { return newtonian(symbound::parse(g, {"q"})); }

  SystemClass system_class() const { return class_; }

  /// Source expressions; which are present depends on the class.
  const std::optional<Expr>& hamiltonian_expr() const { return h_; }
  const std::optional<Expr>& kinetic_expr() const { return t_; }
  const std::optional<Expr>& potential_expr() const { return v_; }
  const std::optional<Expr>& force_expr() const { return g_; }

  VectorField vector_field(const State& x) const {
    if (class_ == SystemClass::Newtonian) return {eval_pq(*g_, x.p, x.q), x.p};
    return {-eval_pq(hq_, x.p, x.q), eval_pq(hp_, x.p, x.q)};
  }

  /// Exact Jacobian of the vector field: [[-H_pq, -H_qq], [H_pp, H_pq]].
  Mat2 jacobian(const State& x) const {
    const double hpq = eval_pq(hpq_, x.p, x.q);
    return {-hpq, -eval_pq(hqq_, x.p, x.q), eval_pq(hpp_, x.p, x.q), hpq};
  }

  /// Gradient components H_p and H_q (the implicit midpoint rule needs both).
  double dH_dp(const State& x) const { return eval_pq(hp_, x.p, x.q); }
  double dH_dq(const State& x) const { return eval_pq(hq_, x.p, x.q); }

  /// Energy. Newtonian systems carry no potential, so this is NotApplicable for them.
  double energy(const State& x) const {
    if (!h_) {
      throw Error(ErrorCode::NotApplicable, "energy is not available for a newtonian system");
    }
    return eval_pq(*h_, x.p, x.q);
  }
  bool has_energy() const { return h_.has_value(); }

  SeparableView separable_view() const {
    switch (class_) {
      case SystemClass::Separable: return {hp_, hpp_, hq_, hqq_};
      case SystemClass::Newtonian: return {Expr::variable("p"), Expr::constant(1.0), hq_, hqq_};
      case SystemClass::General: break;
    }
    throw Error(ErrorCode::NotApplicable, "a general Hamiltonian has no separable splitting");
  }

  /// The same dynamics written as a General system (H = T + V). Newtonian
  /// systems cannot be lifted without integrating g.
  HamiltonianSystem to_general() const {
    if (class_ == SystemClass::General) return *this;
    if (class_ == SystemClass::Separable) return general(*h_);
    throw Error(ErrorCode::NotApplicable, "a newtonian system has no explicit potential");
  }

  std::string description() const {
    switch (class_) {
      case SystemClass::General: return "H = " + to_string(*h_);
      case SystemClass::Separable: return "T = " + to_string(*t_) + ", V = " + to_string(*v_);
      case SystemClass::Newtonian: return "g = " + to_string(*g_);
    }
    return {};
  }

 private:
  explicit HamiltonianSystem(SystemClass c) : class_(c) {}

  static void require_only(const Expr& e, const std::string& var, const char* what) {
    for (const auto& name : variables(e)) {
      if (name != var) {
        throw Error(ErrorCode::UnknownIdentifier,
                    std::string(what) + " may only depend on " + var + ", found '" + name + "'");
      }
    }
  }

  SystemClass class_;
  std::optional<Expr> h_, t_, v_, g_;
  Expr dg_;
  Expr hp_, hq_, hpp_, hpq_, hqq_;
};

// ---------------------------------------------------------------------------
// Equilibria

enum class EquilibriumKind { Center, Saddle, Rank1Degenerate, Rank0Zero };

constexpr std::string_view to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Center: return "center";
    case EquilibriumKind::Saddle: return "saddle";
    case EquilibriumKind::Rank1Degenerate: return "rank1";
    case EquilibriumKind::Rank0Zero: return "rank0";
  }
  return "?";
}

inline constexpr double kTraceTolerance = 1e-10;
inline constexpr double kEquilibriumTolerance = 1e-10;

/// det A is treated as zero when |det A| <= 1e-9 (1 + |A|_F^2).
inline double degeneracy_threshold(const Mat2& a) {
  const double f = a.norm_frobenius();
  return 1e-9 * (1.0 + f * f);
}

inline EquilibriumKind classify_equilibrium(const Mat2& a, double tol = kTraceTolerance) {
  if (std::abs(a.trace()) > tol * std::max(1.0, a.norm_max())) {
    throw Error(ErrorCode::NotTraceFree, "linearization has trace " + detail::format_real(a.trace()));
  }
  const double d = a.det();
  const double thr = degeneracy_threshold(a);
  if (d > thr) return EquilibriumKind::Center;
  if (d < -thr) return EquilibriumKind::Saddle;
  if (a.norm_max() <= 1e-9) return EquilibriumKind::Rank0Zero;
  return EquilibriumKind::Rank1Degenerate;
}

struct Equilibrium {
  State point;
  Mat2 A;
  EquilibriumKind kind = EquilibriumKind::Center;
  double residual = 0.0;
  SystemClass system_class = SystemClass::General;
};

/// Jacobian of the vector field at an equilibrium. `x0` must have residual <= 1e-8.
inline Mat2 linearize(const HamiltonianSystem& sys, const State& x0) {
  const double r = sys.vector_field(x0).norm();
  if (!(r <= 1e-8)) {
    throw Error(ErrorCode::NotAnEquilibrium, "vector field has norm " + detail::format_real(r) + " at (" +
                                                 detail::format_real(x0.p) + ", " + detail::format_real(x0.q) +
                                                 ")");
  }
  return sys.jacobian(x0);
}

inline Equilibrium make_equilibrium(const HamiltonianSystem& sys, const State& x0) {
  Equilibrium eq;
  eq.point = x0;
  eq.A = linearize(sys, x0);
  eq.kind = classify_equilibrium(eq.A);
  eq.residual = sys.vector_field(x0).norm();
  eq.system_class = sys.system_class();
  return eq;
}

struct EquilibriumSearch {
  double p_lo = -5.0, p_hi = 5.0;
  double q_lo = -5.0, q_hi = 5.0;
  int grid = 32;
  double tol = kEquilibriumTolerance;
};

struct EquilibriumSet {
  std::vector<Equilibrium> points;
  /// More than `grid` distinct points converged: the equilibrium set is
  /// probably a curve or region and `points` are only representatives.
  bool continuum_suspected = false;
};

namespace detail {

inline std::optional<State> newton_equilibrium(const HamiltonianSystem& sys, State x, double tol) {
  auto residual = [&](const State& s) { return sys.vector_field(s).norm(); };
  try {
    double r = residual(x);
    int polish = 0;  // extra steps once converged, to land on the rounding floor
    for (int it = 0; it < 50 && polish < 3; ++it) {
      if (r < tol) ++polish;
      if (r == 0.0) break;
      const VectorField f = sys.vector_field(x);
      const Mat2 j = sys.jacobian(x);
      // Levenberg-regularised Newton: (J^T J + mu I) dx = -J^T F. Reduces to
      // plain Newton for nonsingular J and to the minimum-norm step otherwise.
      const double jf = j.norm_frobenius();
      const double mu = 1e-14 * (1.0 + jf * jf);
      const Mat2 normal = j.transpose() * j + mu * Mat2::identity();
      const Vec2 rhs = -1.0 * (j.transpose() * Vec2{f.dp, f.dq});
      Vec2 dx = normal.inverse() * rhs;
      bool improved = false;
      for (int halving = 0; halving < 30; ++halving) {
        const State trial{x.p + dx.x, x.q + dx.y};
        const double rt = residual(trial);
        if (rt < r) {
          x = trial;
          r = rt;
          improved = true;
          break;
        }
        dx = 0.5 * dx;
      }
      if (!improved) break;
    }
    if (r < tol) {
      // land exactly on zero coordinates when that is at least as good
      for (double State::*c : {&State::p, &State::q}) {
        if (x.*c == 0.0 || std::abs(x.*c) > 1e-14) continue;
        State snapped = x;
        snapped.*c = 0.0;
        const double rs = residual(snapped);
        if (rs <= r) {
          x = snapped;
          r = rs;
        }
      }
      return x;
    }
  } catch (const Error&) {
  }
  return std::nullopt;
}

}  // namespace detail

/// Newton from every node of a grid x grid lattice over the box; converged
/// points are deduplicated within 1e-6 and sorted by (q, p).
inline EquilibriumSet find_equilibria(const HamiltonianSystem& sys, const EquilibriumSearch& search = {}) {
  const int n = std::max(search.grid, 4);
  const double slack = 1e-9 * (1.0 + std::max(std::abs(search.p_hi - search.p_lo), std::abs(search.q_hi - search.q_lo)));
  std::vector<State> found;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const State seed{search.p_lo + (search.p_hi - search.p_lo) * i / (n - 1),
                       search.q_lo + (search.q_hi - search.q_lo) * j / (n - 1)};
      auto x = detail::newton_equilibrium(sys, seed, search.tol);
      if (!x) continue;
      if (x->p < search.p_lo - slack || x->p > search.p_hi + slack || x->q < search.q_lo - slack ||
          x->q > search.q_hi + slack) {
        continue;
      }
      const bool duplicate =
          std::any_of(found.begin(), found.end(), [&](const State& s) { return distance(s, *x) <= 1e-6; });
      if (!duplicate) found.push_back(*x);
    }
  }
  std::sort(found.begin(), found.end(), [](const State& a, const State& b) {
    return a.q != b.q ? a.q < b.q : a.p < b.p;
  });

  EquilibriumSet out;
  out.continuum_suspected = static_cast<int>(found.size()) > n;
  out.points.reserve(found.size());
  for (const State& x : found) out.points.push_back(make_equilibrium(sys, x));
  return out;
}

}  // namespace symbound
