#pragma once

// Built-in property suites behind `symbound verify`. Sample counts are
// reduced relative to the unit tests so a run takes a few seconds. Output is
// a pure function of the seed: no timings, no addresses.

#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "symbound/analyzer.hpp"
#include "symbound/catalog.hpp"
#include "symbound/errorprop.hpp"
#include "symbound/orbit.hpp"
#include "symbound/parse.hpp"
#include "symbound/random.hpp"

namespace symbound {

inline constexpr std::uint64_t kDefaultSeed = 20240607;

struct SuiteResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  std::string first_failure;

  bool passed() const { return failures == 0 && checks > 0; }

  void expect(bool ok, const std::function<std::string()>& describe) {
    ++checks;
    if (ok) return;
    if (failures++ == 0) first_failure = describe();
  }
};

struct VerifySummary {
  std::uint64_t seed = kDefaultSeed;
  std::vector<SuiteResult> suites;

  bool ok() const {
    for (const auto& s : suites) {
      if (!s.passed()) return false;
    }
    return true;
  }
};

namespace verify {

inline std::string fmt(double v) { return format_value(v); }

// a continuum of equilibria is checked at one point
inline std::vector<Equilibrium> representatives(const HamiltonianSystem& sys) {
  EquilibriumSet set = find_equilibria(sys);
  if (set.continuum_suspected && !set.points.empty()) set.points.resize(1);
  return set.points;
}

inline double five_point(const Expr& e, double x, double h) {
  auto f = [&](double t) { return eval(e, {{"x", t}}); };
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

inline void derivative_vs_fd(Rng& rng, SuiteResult& r) {
  int accepted = 0;
  for (int attempt = 0; attempt < 6000 && accepted < 300; ++attempt) {
    const Expr e = random_expr(rng);
    const double x = uniform(rng, -2.0, 2.0);
    double value = 0, fd = 0, fd_half = 0;
    try {
      value = eval(e, {{"x", x}});
      fd = five_point(e, x, 1e-3);
      fd_half = five_point(e, x, 5e-4);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(value) || std::abs(value) > 1e6 || !std::isfinite(fd)) continue;
    if (std::abs(fd - fd_half) > 1e-7 * (1 + std::abs(fd))) continue;
    ++accepted;
    double d = std::nan("");
    try {
      d = eval(differentiate(e, "x"), {{"x", x}});
    } catch (const Error&) {
    }
    r.expect(std::abs(d - fd) <= 1e-5 * (1 + std::abs(fd)),
             [&] { return to_string(e) + " at x=" + fmt(x) + ": " + fmt(d) + " vs " + fmt(fd); });
  }
}

inline void simplify_preserves_value(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 300; ++i) {
    const Expr e = random_expr(rng);
    const double x = uniform(rng, -2.0, 2.0);
    double a = 0;
    try {
      a = eval(e, {{"x", x}});
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(a)) continue;
    double b = std::nan("");
    try {
      b = eval(simplify(e), {{"x", x}});
    } catch (const Error&) {
    }
    r.expect(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)), [&] { return to_string(e); });
  }
}

inline void print_round_trip(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_expr(rng, {6, "x", true});
    const Expr back = parse(to_string(e));
    const double x = uniform(rng, -2.0, 2.0);
    auto value = [&](const Expr& t) {
      try {
        return eval(t, {{"x", x}});
      } catch (const Error&) {
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    const double a = value(e), b = value(back);
    r.expect(a == b || (std::isnan(a) && std::isnan(b)), [&] { return to_string(e); });
  }
}

inline void linearization_checks(SuiteResult& trace_free, SuiteResult& fd_jacobian) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      trace_free.expect(std::abs(eq.A.trace()) <= 1e-10, [&] { return entry.name + " " + to_string(eq.A); });
      const double h = 1e-5;
      const State& x = eq.point;
      const VectorField fp = entry.system.vector_field({x.p + h, x.q});
      const VectorField fm = entry.system.vector_field({x.p - h, x.q});
      const VectorField gp = entry.system.vector_field({x.p, x.q + h});
      const VectorField gm = entry.system.vector_field({x.p, x.q - h});
      const Mat2 fd{(fp.dp - fm.dp) / (2 * h), (gp.dp - gm.dp) / (2 * h), (fp.dq - fm.dq) / (2 * h),
                    (gp.dq - gm.dq) / (2 * h)};
      fd_jacobian.expect((fd - eq.A).norm_max() <= 1e-6, [&] { return entry.name; });
    }
  }
}

inline void reduction_consistency(SuiteResult& r) {
  const auto newton = HamiltonianSystem::newtonian("-sin(q)");
  const auto sep = HamiltonianSystem::separable("p^2/2", "-cos(q)");
  const auto gen = sep.to_general();
  for (double p = -2; p <= 2; p += 0.5) {
    for (double q = -3; q <= 3; q += 0.5) {
      const VectorField a = newton.vector_field({p, q});
      const VectorField b = sep.vector_field({p, q});
      const VectorField c = gen.vector_field({p, q});
      r.expect(std::abs(a.dp - b.dp) <= 1e-12 && std::abs(a.dq - b.dq) <= 1e-12 && std::abs(b.dp - c.dp) <= 1e-12 &&
                   std::abs(b.dq - c.dq) <= 1e-12,
               [&] { return "at (" + fmt(p) + ", " + fmt(q) + ")"; });
    }
  }
  const auto a = find_equilibria(newton).points;
  const auto b = find_equilibria(sep).points;
  r.expect(a.size() == b.size(), [] { return "equilibrium counts differ"; });
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    r.expect(a[i].kind == b[i].kind, [&] { return "kind differs at index " + std::to_string(i); });
  }
}

inline void det_s_sweep(SuiteResult& r) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        for (int i = 0; i <= 40; ++i) {
          const double tau = std::pow(10.0, -3.0 + 5.0 * i / 40);
          try {
            const Mat2 s = propagator(k, eq.A, tau).S;
            r.expect(unimodular_defect(s) <= 1e-12,
                     [&] { return entry.name + " " + std::string(to_string(k)) + " tau=" + fmt(tau); });
          } catch (const Error& e) {
            r.expect(e.code() == ErrorCode::SingularCayley, [&] { return std::string(e.what()); });
          }
        }
      }
    }
  }
}

inline void trace_formula(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 500; ++i) {
    const Mat2 a = random_separable(rng);
    const double tau = random_tau(rng, 1e-3, 10.0);
    const double expected = 2 - tau * tau * a.a21 * (-a.a12);
    for (SchemeKind k : {SchemeKind::EulerB, SchemeKind::Yoshida2, SchemeKind::StormerVerlet}) {
      const double tr = propagator(k, a, tau).S.trace();
      r.expect(std::abs(tr - expected) <= 1e-12 * std::max(1.0, std::abs(expected)),
               [&] { return to_string(a) + " tau=" + fmt(tau); });
    }
  }
}

inline void symplecticity(Rng& rng, SuiteResult& r) {
  const auto pendulum = HamiltonianSystem::newtonian("-sin(q)");
  for (int i = 0; i < 20; ++i) {
    const State x{uniform(rng, -2, 2), uniform(rng, -std::numbers::pi, std::numbers::pi)};
    for (SchemeKind k : kAllSchemes) {
      for (double tau : {0.01, 0.1, 0.5}) {
        const double d = symplecticity_defect(k, pendulum, x, tau);
        r.expect(d <= 1e-7, [&] { return std::string(to_string(k)) + " tau=" + fmt(tau) + " defect=" + fmt(d); });
      }
    }
  }
  // the test must be able to see a non-symplectic map
  const auto harmonic = HamiltonianSystem::newtonian("-q");
  const double control = symplecticity_defect_of(
      [&](const State& s) {
        const VectorField f = harmonic.vector_field(s);
        return State{s.p + 0.1 * f.dp, s.q + 0.1 * f.dq};
      },
      {0.3, 0.2}, 1e-5);
  r.expect(control > 1e-3, [&] { return "explicit Euler control defect " + fmt(control); });
}

inline void propagator_vs_linearization(SuiteResult& r) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        for (double tau : {0.1, 0.7}) {
          const double d = propagator_matches_linearization(k, entry.system, eq, tau);
          r.expect(d <= 1e-6, [&] { return entry.name + " " + std::string(to_string(k)) + " diff=" + fmt(d); });
        }
      }
    }
  }
}

inline void theorem1_agreement(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 1000; ++i) {
    const Mat2 general = random_trace_free(rng);
    const Mat2 shaped{0, general.a12, general.a21, 0};
    for (SchemeKind k : kAllSchemes) {
      const Mat2& a = k == SchemeKind::ImplicitMidpoint ? general : shaped;
      if (std::abs(a.det()) <= 1e-6) continue;
      for (int j = 0; j < 20; ++j) {
        const double tau = random_tau(rng);
        Mat2 s;
        try {
          s = propagator(k, a, tau).S;
        } catch (const Error&) {
          continue;
        }
        if (std::abs(std::abs(s.trace()) - 2.0) <= 1e-6) continue;
        const bool holds = check_theorem1(a, s).condition_holds;
        const bool dims = dim_bounded_discrete(s).dim == dim_bounded_continuous(a).dim;
        r.expect(holds == dims, [&] { return to_string(a) + " " + std::string(to_string(k)) + " tau=" + fmt(tau); });
      }
    }
  }
}

inline void discrete_dim_oracle(Rng& rng, SuiteResult& r) {
  int done = 0;
  while (done < 100) {
    const Mat2 s = random_unimodular(rng);
    const double margin = std::abs(s.trace()) - 2.0;
    if (std::abs(margin) < 0.1) continue;
    ++done;
    const BoundedSubspace b = dim_bounded_discrete(s);
    for (int k = 0; k < 10; ++k) {
      Vec2 y{uniform(rng, -1, 1), uniform(rng, -1, 1)};
      if (!b.whole_space && direction_gap(y, b.basis[0]) <= 1e-9) continue;
      bool bounded = true;
      for (int n = 0; n < 10000 && bounded; ++n) {
        y = s * y;
        bounded = y.norm() <= 1e8;
      }
      r.expect(bounded == (b.dim == 2), [&] { return to_string(s); });
    }
  }
}

inline void tau_max_vs_empirical(SuiteResult& r) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        const TauLimit closed = tau_max(k, eq);
        const double hi = closed.finite() ? std::max(10.0, 2 * closed.value) : 10.0;
        double emp = std::nan("");
        try {
          emp = empirical_tau_max(k, eq, hi);
        } catch (const Error&) {
        }
        const bool ok = closed.finite() ? std::abs(emp - closed.value) <= 1e-5 : std::isinf(emp);
        r.expect(ok, [&] {
          return entry.name + " " + std::string(to_string(k)) + " closed=" + fmt(closed.value) + " empirical=" + fmt(emp);
        });
      }
    }
  }
}

inline void fixed_points(SuiteResult& r) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        for (double tau : {0.1, 1.0}) {
          const double d = distance(step(k, entry.system, eq.point, tau), eq.point);
          r.expect(d <= kFixedPointTolerance, [&] { return entry.name + " " + std::string(to_string(k)); });
        }
      }
    }
  }
}

inline Mat2 random_elliptic(Rng& rng) {
  for (;;) {
    const Mat2 s = random_unimodular(rng);
    if (std::abs(s.trace()) < 2.0 - 1e-3) return s;
  }
}

inline void closed_form_vs_iterate(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 200; ++i) {
    const ErrorModel m = make_error_model(random_elliptic(rng), {uniform(rng, -1e-3, 1e-3), uniform(rng, -1e-3, 1e-3)},
                                          {uniform(rng, -1, 1), uniform(rng, -1, 1)});
    const Vec2 a = iterate_error(m, 1000);
    const Vec2 b = closed_form_error(m, 1000);
    const double scale = std::max({a.norm(), resolvent_offset(m).norm(), m.y0.norm()});
    r.expect((a - b).norm() <= 1e-9 * scale, [&] { return to_string(m.S); });
  }
}

inline void singular_resolvent(Rng& rng, SuiteResult& r) {
  for (int i = 0; i < 200; ++i) {
    const double c = uniform(rng, -5, 5);
    const Mat2 s = i % 2 ? Mat2{1, c, 0, 1} : Mat2{1, 0, c, 1};
    bool raised = false;
    try {
      resolvent_offset(make_error_model(s, {1, 0}, {0, 0}));
    } catch (const Error& e) {
      raised = e.code() == ErrorCode::SingularResolvent;
    }
    r.expect(raised, [&] { return to_string(s); });
  }
  for (int i = 0; i < 200; ++i) {
    const Mat2 s = random_unimodular(rng);
    if (std::abs(s.trace() - 2.0) <= 1e-12) continue;
    bool raised = false;
    try {
      resolvent_offset(make_error_model(s, {1, 0}, {0, 0}));
    } catch (const Error&) {
      raised = true;
    }
    r.expect(!raised, [&] { return to_string(s); });
  }
}

inline void orbit_linear_consistency(SuiteResult& r) {
  for (const auto& entry : catalog()) {
    for (const auto& eq : representatives(entry.system)) {
      if (eq.kind != EquilibriumKind::Center) continue;
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        for (double tau : {0.5, 1.5, 2.1, 3.0}) {
          const double tr = std::abs(propagator(k, eq.A, tau).S.trace());
          if (tr > 1.9 && tr < 2.1) continue;
          SimulationOptions opt;
          opt.n_max = 10000;
          opt.escape_radius = 1.0;
          opt.origin = eq.point;
          const OrbitTrace t = simulate(entry.system, k, {eq.point.p + 6e-4, eq.point.q + 8e-4}, tau, opt);
          const bool ok = tr <= 1.9 ? t.bounded() : t.escaped();
          r.expect(ok, [&] { return entry.name + " " + std::string(to_string(k)) + " tau=" + fmt(tau); });
        }
      }
    }
  }
}

inline void orbit_determinism(SuiteResult& r) {
  const auto pendulum = HamiltonianSystem::general("p^2/2 - cos(q)");
  for (SchemeKind k : {SchemeKind::ImplicitMidpoint}) {
    const OrbitTrace a = simulate(pendulum, k, {0.4, 1.0}, 0.37, {2000, 1e6, 1});
    const OrbitTrace b = simulate(pendulum, k, {0.4, 1.0}, 0.37, {2000, 1e6, 1});
    r.expect(a.states == b.states && a.steps == b.steps, [] { return "traces differ"; });
  }
}

}  // namespace verify

/// Runs every suite. Each suite draws from its own generator seeded by
/// (seed, suite index), so suites do not perturb each other.
inline VerifySummary run_verify(std::uint64_t seed = kDefaultSeed) {
  VerifySummary out;
  out.seed = seed;
  std::uint32_t index = 0;
  auto add = [&](const char* name, auto&& body) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), index++};
    Rng rng(seq);
    SuiteResult r;
    r.name = name;
    try {
      body(rng, r);
    } catch (const std::exception& e) {
      r.expect(false, [&] { return std::string("unexpected error: ") + e.what(); });
    }
    out.suites.push_back(std::move(r));
  };
  using namespace verify;
  add("derivative-vs-finite-difference", [](Rng& g, SuiteResult& r) { derivative_vs_fd(g, r); });
  add("simplify-preserves-value", [](Rng& g, SuiteResult& r) { simplify_preserves_value(g, r); });
  add("print-parse-round-trip", [](Rng& g, SuiteResult& r) { print_round_trip(g, r); });
  SuiteResult jac;
  jac.name = "linearization-vs-finite-difference";
  add("linearization-trace-free", [&](Rng&, SuiteResult& r) { linearization_checks(r, jac); });
  out.suites.push_back(jac);
  add("reduction-consistency", [](Rng&, SuiteResult& r) { reduction_consistency(r); });
  add("det-S-sweep", [](Rng&, SuiteResult& r) { det_s_sweep(r); });
  add("trace-formula", [](Rng& g, SuiteResult& r) { trace_formula(g, r); });
  add("symplecticity", [](Rng& g, SuiteResult& r) { symplecticity(g, r); });
  add("propagator-vs-linearization", [](Rng&, SuiteResult& r) { propagator_vs_linearization(r); });
  add("theorem1-agreement", [](Rng& g, SuiteResult& r) { theorem1_agreement(g, r); });
  add("discrete-dim-oracle", [](Rng& g, SuiteResult& r) { discrete_dim_oracle(g, r); });
  add("tau_max-vs-empirical", [](Rng&, SuiteResult& r) { tau_max_vs_empirical(r); });
  add("fixed-points", [](Rng&, SuiteResult& r) { fixed_points(r); });
  add("closed-form-vs-iterate", [](Rng& g, SuiteResult& r) { closed_form_vs_iterate(g, r); });
  add("singular-resolvent", [](Rng& g, SuiteResult& r) { singular_resolvent(g, r); });
  add("orbit-linear-consistency", [](Rng&, SuiteResult& r) { orbit_linear_consistency(r); });
  add("orbit-determinism", [](Rng&, SuiteResult& r) { orbit_determinism(r); });
  return out;
}

inline void write_verify_summary(std::ostream& out, const VerifySummary& s) {
  out << "verify seed=" << s.seed << '\n';
  int passed = 0;
  for (const auto& r : s.suites) {
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-36s checks=%ld failures=%ld\n", r.passed() ? "PASS" : "FAIL",
                  r.name.c_str(), r.checks, r.failures);
    out << line;
    if (!r.first_failure.empty()) out << "     first failure: " << r.first_failure << '\n';
    if (r.passed()) ++passed;
  }
  out << "result: " << (s.ok() ? "PASS" : "FAIL") << " (" << passed << "/" << s.suites.size() << " suites)\n";
}

}  // namespace symbound
