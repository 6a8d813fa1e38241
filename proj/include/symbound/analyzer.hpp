#pragma once

// Local-boundedness preservation at equilibria.
//
// For a trace-free A (linearized Hamiltonian flow) and a unimodular S(tau)
// (linearized symplectic step), the bounded-orbit subspaces are read off the
// spectra, and the trace/rank test decides whether the step preserves them:
//
//   A center   (det A > 0)   needs |tr S| < 2
//   A saddle   (det A < 0)   needs |tr S| > 2
//   rank A = 1               needs tr S = 2 and rank(S - I) = 1
//   A = 0                    needs S = I

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "symbound/error.hpp"
#include "symbound/mat2.hpp"
#include "symbound/schemes.hpp"
#include "symbound/systems.hpp"

namespace symbound {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance on |tr S| - 2 for the strict inequalities, and on ||S - I|| for
/// the identity test.
inline constexpr double kBoundaryTolerance = 1e-9;

/// Propagators must satisfy unimodular_defect(S) <= this.
inline constexpr double kUnimodularTolerance = 1e-9;

struct BoundedSubspace {
  int dim = 0;
  std::vector<Vec2> basis;  // empty when whole_space
  bool whole_space = false;

  static BoundedSubspace whole() { return {2, {}, true}; }
  static BoundedSubspace line(Vec2 v) { return {1, {canonical_direction(v)}, false}; }
};

/// Initial conditions whose continuous semi-orbit under dy/dt = A y is bounded.
inline BoundedSubspace dim_bounded_continuous(const Mat2& a) {
  switch (classify_equilibrium(a)) {
    case EquilibriumKind::Center:
    case EquilibriumKind::Rank0Zero: return BoundedSubspace::whole();
    case EquilibriumKind::Saddle: {
      const double mu = std::sqrt(-a.det());
      return BoundedSubspace::line(eigenvector(a, -mu));
    }
    case EquilibriumKind::Rank1Degenerate:
      // y(t) = (I + tA) y0 grows linearly unless A y0 = 0
      return BoundedSubspace::line(kernel_direction(a));
  }
  return {};
}

inline void require_unimodular(const Mat2& s) {
  if (unimodular_defect(s) > kUnimodularTolerance) {
    throw Error(ErrorCode::NotUnimodular, "det S = " + detail::format_real(s.det()) + " for S = " + to_string(s));
  }
}

/// Initial conditions whose discrete semi-orbit under y -> S y is bounded.
inline BoundedSubspace dim_bounded_discrete(const Mat2& s, double tol = kBoundaryTolerance) {
  require_unimodular(s);
  const double tr = s.trace();
  const double margin = std::abs(tr) - 2.0;
  if (margin < -tol) return BoundedSubspace::whole();  // elliptic: conjugate to a rotation
  if (margin > tol) {
    // hyperbolic pair lambda, 1/lambda; bounded along the contracting eigenvector
    const auto ev = real_eigenvalues(s);
    const double contracting = std::abs((*ev)[0]) < std::abs((*ev)[1]) ? (*ev)[0] : (*ev)[1];
    return BoundedSubspace::line(eigenvector(s, contracting));
  }
  // parabolic: +-I, or a shear bounded only along its fixed line
  const Mat2 sign_i = (tr > 0.0 ? 1.0 : -1.0) * Mat2::identity();
  const Mat2 shear = s - sign_i;
  if (shear.norm_max() <= tol) return BoundedSubspace::whole();
  return BoundedSubspace::line(kernel_direction(shear));
}

enum class Containment { Exact, DimOnly, NotApplicable };

constexpr std::string_view to_string(Containment c) {
  switch (c) {
    case Containment::Exact: return "exact";
    case Containment::DimOnly: return "dim-only";
    case Containment::NotApplicable: return "n/a";
  }
  return "?";
}

struct PreservationVerdict {
  int theorem_case = 0;  // 1 center, 2 saddle, 3 rank one, 4 zero
  bool condition_holds = false;
  /// |tr S| is within tolerance of 2 in cases 1-2; the strict inequality is
  /// then reported as failing.
  bool marginal = false;
  int dim_B_A = 0;
  int dim_B_S = 0;
  Containment containment = Containment::NotApplicable;
  double det_A = 0.0;
  double trace_S = 0.0;
};

inline int theorem_case(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::Center: return 1;
    case EquilibriumKind::Saddle: return 2;
    case EquilibriumKind::Rank1Degenerate: return 3;
    case EquilibriumKind::Rank0Zero: return 4;
  }
  return 0;
}

inline PreservationVerdict check_theorem1(const Mat2& a, const Mat2& s, double tol = kBoundaryTolerance) {
  const EquilibriumKind kind = classify_equilibrium(a);
  require_unimodular(s);

  PreservationVerdict v;
  v.theorem_case = theorem_case(kind);
  v.det_A = a.det();
  v.trace_S = s.trace();
  const double margin = std::abs(v.trace_S) - 2.0;
  const Mat2 s_minus_i = s - Mat2::identity();
  switch (kind) {
    case EquilibriumKind::Center:
      v.condition_holds = margin < -tol;
      v.marginal = std::abs(margin) <= tol;
      break;
    case EquilibriumKind::Saddle:
      v.condition_holds = margin > tol;
      v.marginal = std::abs(margin) <= tol;
      break;
    case EquilibriumKind::Rank1Degenerate:
      v.condition_holds = std::abs(v.trace_S - 2.0) <= tol && s_minus_i.rank(tol) == 1;
      break;
    case EquilibriumKind::Rank0Zero:
      v.condition_holds = std::abs(v.trace_S - 2.0) <= tol && s_minus_i.norm_max() <= tol;
      break;
  }

  const BoundedSubspace ba = dim_bounded_continuous(a);
  const BoundedSubspace bs = dim_bounded_discrete(s, tol);
  v.dim_B_A = ba.dim;
  v.dim_B_S = bs.dim;
  bool contained = bs.whole_space;
  if (!contained && !ba.whole_space) contained = direction_gap(ba.basis[0], bs.basis[0]) <= 1e-9;
  if (ba.dim == bs.dim) {
    v.containment = contained ? Containment::Exact : Containment::DimOnly;
  }
  return v;
}

// ---------------------------------------------------------------------------
// Step-size limits

struct TauLimit {
  double value = kInf;
  /// Which closed form produced the value, e.g. "2/sqrt(T''V'')".
  std::string formula_source;
  /// The limit is where the midpoint rule's implicit equation becomes singular.
  bool singular = false;

  bool finite() const { return std::isfinite(value); }
};

/// Closed-form preserving limitation at an equilibrium:
///   euler-b, yoshida2   2/sqrt(T''(p0) V''(q0))   if T''V'' > 0
///   stormer-verlet      2/sqrt(-g'(q0))           if g'(q0) < 0
///   implicit-midpoint   2/sqrt(-H0)               if H0 = H_pp H_qq - H_pq^2 < 0
/// and +inf otherwise.
inline TauLimit tau_max(SchemeKind scheme, const Equilibrium& eq) {
  require_applicable(scheme, eq.system_class);
  const Mat2& a = eq.A;
  TauLimit out;
  switch (scheme) {
    case SchemeKind::EulerB:
    case SchemeKind::Yoshida2: {
      const double t2 = a.a21;   // T''(p0)
      const double v2 = -a.a12;  // V''(q0)
      out.formula_source = "2/sqrt(T''V'')";
      if (t2 * v2 > 0.0) out.value = 2.0 / std::sqrt(t2 * v2);
      break;
    }
    case SchemeKind::StormerVerlet: {
      const double dg = a.a12;  // g'(q0)
      out.formula_source = "2/sqrt(-g')";
      if (dg < 0.0) out.value = 2.0 / std::sqrt(-dg);
      break;
    }
    case SchemeKind::ImplicitMidpoint: {
      const double hpp = a.a21, hqq = -a.a12, hpq = a.a22;
      const double h0 = hpp * hqq - hpq * hpq;
      out.formula_source = "2/sqrt(-H0)";
      if (h0 < 0.0) {
        out.value = 2.0 / std::sqrt(-h0);
        out.singular = true;
      }
      break;
    }
  }
  return out;
}

enum class PredicateState { Holds, Fails, Marginal };

/// The linear preservation predicate used for bisection. For the midpoint
/// rule, steps past the first zero of det(I - tau A/2) leave the solution
/// branch that connects to tau -> 0, so they count as failing.
inline PredicateState linear_condition_state(SchemeKind scheme, const Mat2& a, double tau) {
  if (scheme == SchemeKind::ImplicitMidpoint) {
    const Mat2 lhs = Mat2::identity() - (0.5 * tau) * a;
    if (!(lhs.det() > 0.0)) return PredicateState::Fails;
  }
  try {
    const PreservationVerdict v = check_theorem1(a, propagator(scheme, a, tau).S);
    if (v.condition_holds) return PredicateState::Holds;
    return v.marginal ? PredicateState::Marginal : PredicateState::Fails;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::SingularCayley) return PredicateState::Fails;
    throw;
  }
}

inline bool linear_condition_holds(SchemeKind scheme, const Mat2& a, double tau) {
  return linear_condition_state(scheme, a, tau) == PredicateState::Holds;
}

/// Bisection on tau of the preservation predicate. Returns +inf when the
/// predicate holds at both tau_hi and 10 tau_hi.
///
/// As tau -> 0 every S(tau) tends to I, so for a centre |tr S| - 2 ~ -tau^2
/// sinks below the boundary tolerance; such leading marginal points are
/// skipped rather than read as failures.
inline double empirical_tau_max(SchemeKind scheme, const Mat2& a, double tau_hi, double tol = 1e-9) {
  if (!(tau_hi > 0.0)) throw Error(ErrorCode::InconsistentPredicate, "tau_hi must be positive");
  auto holds = [&](double tau) { return linear_condition_holds(scheme, a, tau); };

  // coarse log scan over [tau_hi 1e-6, 10 tau_hi] to check monotonicity
  constexpr int kScan = 241;
  const double lo_exp = std::log10(tau_hi) - 6.0;
  const double hi_exp = std::log10(tau_hi) + 1.0;
  double last_true = 0.0;
  double first_false = kInf;
  for (int i = 0; i < kScan; ++i) {
    const double tau = i + 1 == kScan ? 10.0 * tau_hi : std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (kScan - 1));
    const PredicateState st = linear_condition_state(scheme, a, tau);
    if (st == PredicateState::Holds) {
      if (std::isfinite(first_false)) {
        throw Error(ErrorCode::InconsistentPredicate,
                    "preservation predicate recovers at tau=" + detail::format_real(tau) + " after failing at tau=" +
                        detail::format_real(first_false));
      }
      last_true = tau;
    } else if (st == PredicateState::Marginal && last_true == 0.0) {
      continue;
    } else if (!std::isfinite(first_false)) {
      first_false = tau;
    }
  }
  if (last_true == 0.0) {
    throw Error(ErrorCode::InconsistentPredicate,
                "preservation predicate never holds on [" + detail::format_real(std::pow(10.0, lo_exp)) + ", " +
                    detail::format_real(10.0 * tau_hi) + "]");
  }
  if (!std::isfinite(first_false)) return kInf;

  double lo = last_true, hi = first_false;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (holds(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double empirical_tau_max(SchemeKind scheme, const Equilibrium& eq, double tau_hi, double tol = 1e-9) {
  require_applicable(scheme, eq.system_class);
  return empirical_tau_max(scheme, eq.A, tau_hi, tol);
}

// ---------------------------------------------------------------------------
// Reports

struct ReportRow {
  std::size_t equilibrium = 0;  // index into PreservationReport::equilibria
  double tau = 0.0;
  std::optional<PreservationVerdict> verdict;
  /// step(x0) == x0 within 1e-10.
  bool fixed_point_preserved = false;
  double fixed_point_error = 0.0;
  std::string error;  // per-item failure, e.g. SingularCayley
};

struct EquilibriumSummary {
  Equilibrium eq;
  TauLimit closed_form;
  double empirical = kInf;
  std::string error;
};

struct PreservationReport {
  SchemeKind scheme = SchemeKind::EulerB;
  std::vector<EquilibriumSummary> equilibria;
  std::vector<ReportRow> rows;  // sorted by equilibrium, then tau
  bool continuum_suspected = false;

  /// Smallest closed-form limit over all equilibria: the step-size bound for
  /// preserving boundedness at every equilibrium at once.
  double min_tau_max() const {
    double m = kInf;
    for (const auto& e : equilibria) m = std::min(m, e.closed_form.value);
    return m;
  }

  bool preserved_everywhere(double tau) const {
    for (const auto& r : rows) {
      if (r.tau == tau && !(r.verdict && r.verdict->condition_holds)) return false;
    }
    return true;
  }
};

inline constexpr double kFixedPointTolerance = 1e-10;

/// Per-equilibrium, per-tau verdicts for one scheme over equilibria already located.
inline PreservationReport preservation_report(const HamiltonianSystem& sys, SchemeKind scheme,
                                              const std::vector<Equilibrium>& equilibria, std::vector<double> taus,
                                              double bisection_tol = 1e-9) {
  require_applicable(scheme, sys.system_class());
  std::sort(taus.begin(), taus.end());
  PreservationReport report;
  report.scheme = scheme;

  double tau_hi = 10.0;
  for (double t : taus) tau_hi = std::max(tau_hi, 2.0 * t);

  for (std::size_t i = 0; i < equilibria.size(); ++i) {
    EquilibriumSummary summary;
    summary.eq = equilibria[i];
    try {
      summary.closed_form = tau_max(scheme, summary.eq);
      const double hi = summary.closed_form.finite() ? std::max(tau_hi, 2.0 * summary.closed_form.value) : tau_hi;
      summary.empirical = empirical_tau_max(scheme, summary.eq, hi, bisection_tol);
    } catch (const Error& e) {
      summary.error = e.what();
    }
    report.equilibria.push_back(summary);

    for (double tau : taus) {
      ReportRow row;
      row.equilibrium = i;
      row.tau = tau;
      try {
        row.verdict = check_theorem1(summary.eq.A, propagator(scheme, summary.eq.A, tau).S);
      } catch (const Error& e) {
        row.error = e.what();
      }
      try {
        const State next = step(scheme, sys, summary.eq.point, tau);
        row.fixed_point_error = distance(next, summary.eq.point);
        row.fixed_point_preserved = row.fixed_point_error <= kFixedPointTolerance;
      } catch (const Error& e) {
        if (row.error.empty()) row.error = e.what();
      }
      report.rows.push_back(std::move(row));
    }
  }
  return report;
}

inline PreservationReport preservation_report(const HamiltonianSystem& sys, SchemeKind scheme,
                                              const std::vector<double>& taus, const EquilibriumSearch& search = {},
                                              double bisection_tol = 1e-9) {
  require_applicable(scheme, sys.system_class());
  const EquilibriumSet set = find_equilibria(sys, search);
  PreservationReport report = preservation_report(sys, scheme, set.points, taus, bisection_tol);
  report.continuum_suspected = set.continuum_suspected;
  return report;
}

// ---------------------------------------------------------------------------
// Serialization

/// Reals in shortest round-trip form; +inf as "inf".
inline std::string format_value(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return detail::format_real(v);
}

inline std::string holds_token(const ReportRow& r) {
  if (!r.verdict) return "error";
  if (r.verdict->marginal) return "marginal";
  return r.verdict->condition_holds ? "true" : "false";
}

inline constexpr const char* kReportCsvHeader =
    "p0,q0,case,detA,traceS,dimBA,dimBS,holds,tau_max,empirical_tau_max";

inline void write_report_csv(std::ostream& out, const PreservationReport& report) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : report.rows) {
    const EquilibriumSummary& e = report.equilibria[r.equilibrium];
    out << format_value(e.eq.point.p) << ',' << format_value(e.eq.point.q) << ','
        << theorem_case(e.eq.kind) << ',' << format_value(e.eq.A.det()) << ',';
    if (r.verdict) {
      out << format_value(r.verdict->trace_S) << ',' << r.verdict->dim_B_A << ',' << r.verdict->dim_B_S;
    } else {
      out << "nan," << dim_bounded_continuous(e.eq.A).dim << ",nan";
    }
    out << ',' << holds_token(r) << ',' << format_value(e.closed_form.value) << ','
        << format_value(e.empirical) << '\n';
  }
}

inline void write_report_table(std::ostream& out, const PreservationReport& report) {
  char line[256];
  out << "scheme " << to_string(report.scheme) << '\n';
  std::snprintf(line, sizeof line, "%12s %12s %-7s %14s %14s %s\n", "p0", "q0", "kind", "tau_max", "empirical",
                "source");
  out << line;
  for (const auto& e : report.equilibria) {
    std::snprintf(line, sizeof line, "%12.6g %12.6g %-7s %14s %14s %s%s\n", e.eq.point.p, e.eq.point.q,
                  std::string(to_string(e.eq.kind)).c_str(), format_value(e.closed_form.value).c_str(),
                  format_value(e.empirical).c_str(), e.closed_form.formula_source.c_str(),
                  e.closed_form.singular ? " (singular)" : "");
    out << line;
    if (!e.error.empty()) out << "    error: " << e.error << '\n';
  }
  std::snprintf(line, sizeof line, "%12s %12s %10s %4s %14s %5s %5s %-9s %s\n", "p0", "q0", "tau", "case", "traceS",
                "dimBA", "dimBS", "holds", "fixed-point");
  out << line;
  for (const auto& r : report.rows) {
    const EquilibriumSummary& e = report.equilibria[r.equilibrium];
    std::snprintf(line, sizeof line, "%12.6g %12.6g %10.6g %4d %14.8g %5s %5s %-9s %s\n", e.eq.point.p,
                  e.eq.point.q, r.tau, theorem_case(e.eq.kind), r.verdict ? r.verdict->trace_S : std::nan(""),
                  r.verdict ? std::to_string(r.verdict->dim_B_A).c_str() : "-",
                  r.verdict ? std::to_string(r.verdict->dim_B_S).c_str() : "-", holds_token(r).c_str(),
                  r.fixed_point_preserved ? "ok" : r.error.empty() ? "VIOLATED" : "-");
    out << line;
    if (!r.error.empty()) out << "    error: " << r.error << '\n';
  }
  out << "min tau_max over equilibria: " << format_value(report.min_tau_max()) << '\n';
  if (report.continuum_suspected) out << "note: equilibrium set looks like a continuum; rows are representatives\n";
}

}  // namespace symbound
