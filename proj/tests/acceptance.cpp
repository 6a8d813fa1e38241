// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Every tolerance and sample count is fixed here.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "symbound/analyzer.hpp"
#include "symbound/errorprop.hpp"
#include "symbound/orbit.hpp"
#include "symbound/random.hpp"
#include "symbound/verify.hpp"

using namespace symbound;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (pass) detail = what;
    pass = false;
  }
};

using Clock = std::chrono::steady_clock;

bool report(int id, const char* title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("unexpected error: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    o.require(false, "runtime " + format_value(secs) + " s over budget " + format_value(budget_s) + " s");
  }
  char line[512];
  std::snprintf(line, sizeof line, "%s criterion %d: %s [%.3f s]", o.pass ? "PASS" : "FAIL", id, title, secs);
  std::cout << line;
  if (!o.detail.empty()) std::cout << " -- " << o.detail;
  std::cout << std::endl;
  return o.pass;
}

Equilibrium origin_of(const HamiltonianSystem& sys) { return make_equilibrium(sys, {0.0, 0.0}); }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::ConfigError;  // stands for "nothing thrown"
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  const int status = pclose(pipe);
  if (status != 0) out += "\n<exit status " + std::to_string(status) + ">";
  return out;
}

// 1. explicit schemes on the harmonic oscillator
Outcome explicit_tau_max() {
  Outcome o;
  const auto harmonic = HamiltonianSystem::newtonian("-q");
  const Equilibrium eq = origin_of(harmonic);
  for (SchemeKind s : {SchemeKind::EulerB, SchemeKind::Yoshida2, SchemeKind::StormerVerlet}) {
    const std::string name(to_string(s));
    const double closed = tau_max(s, eq).value;
    o.require(std::abs(closed - 2.0) <= 1e-12, name + " closed form " + format_value(closed));
    const double emp = empirical_tau_max(s, eq, 10.0);
    o.require(std::abs(emp - 2.0) <= 1e-5, name + " empirical " + format_value(emp));
    // trace polynomial 2 - tau^2 leaves [-2, 2] at tau = 2
    for (double tau : {0.5, 1.0, 1.5, 1.999, 2.001, 3.0}) {
      const double tr = propagator(s, eq.A, tau).S.trace();
      o.require(std::abs(tr - (2 - tau * tau)) <= 1e-12, name + " trace at " + format_value(tau));
      o.require(check_theorem1(eq.A, propagator(s, eq.A, tau).S).condition_holds == (tau < 2),
                name + " verdict at " + format_value(tau));
    }
  }
  o.detail = o.pass ? "closed 2, empirical within 1e-5 for euler-b, yoshida2, stormer-verlet" : o.detail;
  return o;
}

// 2. implicit midpoint: unbounded limit on the oscillator, singular limit on H = pq
Outcome midpoint_tau_max() {
  Outcome o;
  const auto harmonic = HamiltonianSystem::general("p^2/2 + q^2/2");
  const Equilibrium h = origin_of(harmonic);
  o.require(!tau_max(SchemeKind::ImplicitMidpoint, h).finite(), "harmonic tau_max finite");
  for (double tau : {10.0, 100.0}) {
    const OrbitTrace t = simulate(harmonic, SchemeKind::ImplicitMidpoint, {1e-3, 0.0}, tau, {100000, 1.0, 0});
    o.require(t.bounded() && t.steps.back() == 100000, "harmonic orbit at tau " + format_value(tau) + ": " +
                                                           verdict_summary(t));
  }

  const auto pq = HamiltonianSystem::general("p*q");
  const Equilibrium e = origin_of(pq);
  const TauLimit lim = tau_max(SchemeKind::ImplicitMidpoint, e);
  o.require(lim.finite() && std::abs(lim.value - 2.0) <= 1e-12 && lim.singular,
            "H = pq limit " + format_value(lim.value));
  for (double tau : {2.0 - 1e-9, 2.0 + 1e-9}) {
    const ErrorCode linear = code_of([&] { propagator(SchemeKind::ImplicitMidpoint, e.A, tau); });
    o.require(linear == ErrorCode::SingularCayley, "linear solve at tau " + format_value(tau) + " did not fail");
    const ErrorCode step_code = code_of([&] { step(SchemeKind::ImplicitMidpoint, pq, {1e-3, 1e-3}, tau); });
    o.require(step_code == ErrorCode::ImplicitSolveFailed, "nonlinear step at tau " + format_value(tau) + " did not fail");
  }
  if (o.pass) o.detail = "harmonic bounded at tau 10, 100 over 1e5 steps; H = pq singular at 2 +- 1e-9";
  return o;
}

// 3. trace/rank verdict vs eigen-structure dimensions
Outcome theorem1_agreement() {
  Outcome o;
  Rng rng(3);
  long compared = 0, skipped = 0;
  for (int i = 0; i < 10000; ++i) {
    const Mat2 general = random_trace_free(rng);
    // explicit schemes apply to separable systems, whose A has zero diagonal
    const Mat2 shaped{0.0, general.a12, general.a21, 0.0};
    for (SchemeKind s : kAllSchemes) {
      const Mat2& a = s == SchemeKind::ImplicitMidpoint ? general : shaped;
      for (int j = 0; j < 20; ++j) {
        const double tau = random_tau(rng);
        if (std::abs(a.det()) < 1e-6) {
          ++skipped;
          continue;
        }
        Mat2 S;
        try {
          S = propagator(s, a, tau).S;
        } catch (const Error&) {
          ++skipped;  // Cayley singular, on the boundary by definition
          continue;
        }
        if (std::abs(std::abs(S.trace()) - 2.0) < 1e-6) {
          ++skipped;
          continue;
        }
        const PreservationVerdict v = check_theorem1(a, S);
        const bool dims = dim_bounded_discrete(S).dim == dim_bounded_continuous(a).dim;
        ++compared;
        o.require(v.condition_holds == dims, to_string(a) + " " + std::string(to_string(s)) + " tau " +
                                                 format_value(tau));
      }
    }
  }
  o.require(compared >= 700000, "only " + std::to_string(compared) + " comparisons");
  if (o.pass) {
    o.detail = std::to_string(compared) + " comparisons agree, " + std::to_string(skipped) + " within 1e-6 of a boundary";
  }
  return o;
}

// 4. finite-difference Jacobian determinant of the one-step maps
Outcome symplecticity() {
  Outcome o;
  const auto pendulum = HamiltonianSystem::newtonian("-sin(q)");
  Rng rng(4);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const State x{uniform(rng, -2.0, 2.0), uniform(rng, -std::numbers::pi, std::numbers::pi)};
    for (SchemeKind s : kAllSchemes) {
      for (double tau : {0.01, 0.1, 0.5}) {
        const Mat2 j = one_step_jacobian([&](const State& y) { return step(s, pendulum, y, tau); }, x, 1e-5);
        const double defect = std::abs(j.det() - 1.0);
        worst = std::max(worst, defect);
        o.require(defect <= 1e-7, std::string(to_string(s)) + " defect " + format_value(defect));
      }
    }
  }
  const auto euler = [&](const State& y) {
    const VectorField f = pendulum.vector_field(y);
    return State{y.p + 0.1 * f.dp, y.q + 0.1 * f.dq};
  };
  // det J = 1 + tau^2 cos q, so the defect vanishes near q = +-pi/2; the
  // control must still be visible across the sample
  Rng rng2(41);
  double control = 0.0;
  int detected = 0;
  for (int i = 0; i < 100; ++i) {
    const State x{uniform(rng2, -2.0, 2.0), uniform(rng2, -std::numbers::pi, std::numbers::pi)};
    const double d = std::abs(one_step_jacobian(euler, x, 1e-5).det() - 1.0);
    control = std::max(control, d);
    detected += d > 1e-3;
  }
  o.require(control > 1e-3, "explicit Euler control defect only " + format_value(control));
  o.require(detected >= 50, "explicit Euler control detected at only " + std::to_string(detected) + "/100 states");
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "max |det J - 1| = %.2e; explicit Euler control defect up to %.4f, > 1e-3 at %d/100 states",
                  worst, control, detected);
    o.detail = buf;
  }
  return o;
}

// 5. closed form of the error recurrence vs iteration
Outcome error_recurrence() {
  Outcome o;
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    Mat2 S;
    do {
      S = random_unimodular(rng);
    } while (!(std::abs(S.trace()) < 2.0 - 1e-3));
    const ErrorModel m = make_error_model(S, {uniform(rng, -1e-3, 1e-3), uniform(rng, -1e-3, 1e-3)},
                                          {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)});
    const Vec2 a = iterate_error(m, 10000);
    const Vec2 b = closed_form_error(m, 10000);
    const double scale = std::max({a.norm(), resolvent_offset(m).norm(), m.y0.norm()});
    const double rel = (a - b).norm() / scale;
    worst = std::max(worst, rel);
    o.require(rel <= 1e-9, to_string(S) + " relative gap " + format_value(rel));
  }
  // singular exactly on tr S = 2
  int singular = 0;
  for (int i = 0; i < 2000; ++i) {
    Mat2 S;
    if (i % 4 == 0) {
      const double c = uniform(rng, -5.0, 5.0);
      S = i % 8 == 0 ? Mat2{1.0, c, 0.0, 1.0} : Mat2{1.0, 0.0, c, 1.0};
    } else if (i % 4 == 1) {
      const double eps = std::pow(10.0, uniform(rng, -11.0, -3.0));  // tr S = 2 - eps
      const double x = uniform(rng, -3.0, 3.0);
      const double a11 = 1.0 - eps / 2 + x, a22 = 1.0 - eps / 2 - x;
      const double a12 = uniform(rng, 0.5, 2.0);
      S = {a11, a12, (a11 * a22 - 1.0) / a12, a22};
    } else {
      S = random_unimodular(rng);
    }
    const bool at_two = std::abs(S.trace() - 2.0) <= 1e-12;
    singular += at_two;
    const bool raised = code_of([&] { resolvent_offset(make_error_model(S, {1.0, 0.0}, {0.0, 0.0})); }) ==
                        ErrorCode::SingularResolvent;
    o.require(raised == at_two, to_string(S) + " tr " + format_value(S.trace()));
  }
  if (o.pass) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "max relative gap %.2e over 1000 models; %d singular cases of 2000 all flagged",
                  worst, singular);
    o.detail = buf;
  }
  return o;
}

// 6. rank-one and rank-zero linearizations
Outcome degenerate_cases() {
  Outcome o;
  const auto free_particle = HamiltonianSystem::newtonian("0");
  const Equilibrium f = origin_of(free_particle);
  o.require(f.kind == EquilibriumKind::Rank1Degenerate, "free particle kind");
  for (double tau : {0.1, 1.0, 10.0, 100.0}) {
    const Mat2 S = propagator(SchemeKind::EulerB, f.A, tau).S;
    const Mat2 shear = S - Mat2::identity();
    o.require(S.trace() == 2.0 && shear.rank() == 1, "euler-b S not a shear at tau " + format_value(tau));
    const PreservationVerdict v = check_theorem1(f.A, S);
    o.require(v.theorem_case == 3 && v.condition_holds && v.dim_B_A == 1 && v.dim_B_S == 1,
              "free particle verdict at tau " + format_value(tau));
  }

  const auto zero_general = HamiltonianSystem::general("0");
  const auto zero_separable = HamiltonianSystem::separable("0", "0");
  const Equilibrium zg = origin_of(zero_general);
  const Equilibrium zs = origin_of(zero_separable);
  o.require(zg.kind == EquilibriumKind::Rank0Zero && zs.kind == EquilibriumKind::Rank0Zero, "H = 0 kind");
  for (double tau : {0.1, 1.0, 10.0, 100.0}) {
    for (SchemeKind s : kAllSchemes) {
      // stormer-verlet needs T = p^2/2, so H = 0 is checked at the linear level only
      const Equilibrium& eq = s == SchemeKind::ImplicitMidpoint ? zg : zs;
      const Mat2 S = propagator(s, eq.A, tau).S;
      o.require(S == Mat2::identity(), std::string(to_string(s)) + " S != E at tau " + format_value(tau));
      const PreservationVerdict v = check_theorem1(eq.A, S);
      o.require(v.theorem_case == 4 && v.condition_holds, std::string(to_string(s)) + " H = 0 verdict");
    }
    const PreservationReport r = preservation_report(zero_general, SchemeKind::ImplicitMidpoint, {zg}, {tau});
    o.require(r.rows.size() == 1 && holds_token(r.rows[0]) == "true", "H = 0 report row");
  }
  if (o.pass) o.detail = "free particle: shear, case 3, dims 1/1; H = 0: S = E, case 4, preserved at tau 0.1..100";
  return o;
}

// 7. nonlinear pendulum orbits
Outcome pendulum_orbits() {
  Outcome o;
  const auto pendulum = HamiltonianSystem::newtonian("-sin(q)");
  const State x0{6e-4, 8e-4};  // radius 1e-3 from the centre
  const OrbitTrace inside = simulate(pendulum, SchemeKind::EulerB, x0, 1.9, {100000, 1.0, 0});
  o.require(inside.bounded() && inside.steps.back() == 100000, "tau 1.9: " + verdict_summary(inside));
  const OrbitTrace outside = simulate(pendulum, SchemeKind::EulerB, x0, 2.1, {10000, 1.0, 0});
  o.require(outside.escaped(), "tau 2.1: " + verdict_summary(outside));

  const State saddle{0.0, std::numbers::pi};
  const Equilibrium eq = make_equilibrium(pendulum, saddle);
  o.require(eq.kind == EquilibriumKind::Saddle && dim_bounded_continuous(eq.A).dim == 1, "saddle structure");
  Rng rng(7);
  int escapes = 0, runs = 0;
  for (SchemeKind s : kAllSchemes) {
    for (double tau : {0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      try {
        o.require(dim_bounded_discrete(propagator(s, eq.A, tau).S).dim == 1,
                  std::string(to_string(s)) + " dim B_S at tau " + format_value(tau));
      } catch (const Error&) {
        // midpoint rule at its singular step 2/sqrt(-H0) = 2: no linear map
      }
      for (int k = 0; k < 8; ++k) {
        const double angle = uniform(rng, 0.0, 2 * std::numbers::pi);
        const State start{saddle.p + 1e-3 * std::cos(angle), saddle.q + 1e-3 * std::sin(angle)};
        SimulationOptions opt{100000, 1.0, 0, saddle};
        const OrbitTrace t = simulate(pendulum, s, start, tau, opt);
        ++runs;
        // a failed implicit solve also leaves the neighbourhood behind
        const bool left = t.escaped() || t.solver_failed();
        escapes += left;
        o.require(left, std::string(to_string(s)) + " tau " + format_value(tau) + ": " + verdict_summary(t));
      }
    }
  }
  if (o.pass) {
    o.detail = "centre bounded at 1.9 (" + verdict_summary(inside) + "), escapes at 2.1; saddle: " +
               std::to_string(escapes) + "/" + std::to_string(runs) + " nearby orbits leave";
  }
  return o;
}

// 8. byte-identical verify summaries
Outcome determinism() {
  Outcome o;
  std::ostringstream a, b;
  write_verify_summary(a, run_verify(42));
  write_verify_summary(b, run_verify(42));
  o.require(a.str() == b.str(), "library summaries differ");
  const std::string cmd = std::string(SYMBOUND_CLI) + " --seed 42 verify";
  const std::string c = capture(cmd);
  const std::string d = capture(cmd);
  o.require(c == d, "CLI summaries differ");
  o.require(c == a.str(), "CLI summary differs from library summary");
  o.require(c.find("result: PASS") != std::string::npos, "verify suites did not all pass");
  if (o.pass) o.detail = "two CLI runs and two library runs identical (" + std::to_string(c.size()) + " bytes)";
  return o;
}

}  // namespace

int main() {
  bool all = true;
  all &= report(1, "tau_max = 2 for explicit schemes on the harmonic oscillator", 1.0, explicit_tau_max);
  all &= report(2, "implicit midpoint: tau_max = inf (harmonic), 2 singular (H = pq)", 5.0, midpoint_tau_max);
  all &= report(3, "trace/rank verdict agrees with eigen-structure dimensions", 10.0, theorem1_agreement);
  all &= report(4, "one-step maps are symplectic; explicit Euler control is detected", 0.0, symplecticity);
  all &= report(5, "error recurrence closed form matches iteration; singular iff tr S = 2", 0.0, error_recurrence);
  all &= report(6, "degenerate linearizations (rank 1, rank 0) are preserved", 0.0, degenerate_cases);
  all &= report(7, "pendulum orbits: centre bounded below tau 2, escapes above; saddle orbits leave", 0.0,
                pendulum_orbits);
  all &= report(8, "verify --seed 42 summaries are byte-identical", 0.0, determinism);
  std::cout << (all ? "acceptance: all criteria PASS" : "acceptance: FAIL") << std::endl;
  return all ? 0 : 1;
}
