#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "symbound/catalog.hpp"
#include "symbound/orbit.hpp"

using namespace symbound;

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

TEST(Simulate, HarmonicEulerB) {
  const auto harmonic = HamiltonianSystem::separable("p^2/2", "q^2/2");
  const OrbitTrace ok = simulate(harmonic, SchemeKind::EulerB, {0.1, 0}, 1.0);
  ASSERT_TRUE(ok.bounded());
  EXPECT_EQ(std::get<Bounded>(ok.verdict).n_steps, 100000u);
  EXPECT_EQ(ok.states.size(), 10001u);  // stride 10 plus the initial state

  const OrbitTrace bad = simulate(harmonic, SchemeKind::EulerB, {0.1, 0}, 2.1);
  ASSERT_TRUE(bad.escaped());
  const Escaped e = std::get<Escaped>(bad.verdict);
  EXPECT_LT(e.step, 2000u);
  EXPECT_GT(e.radius, 1e6);
  EXPECT_EQ(bad.steps.back(), e.step);
}

TEST(Simulate, MidpointSolverFailure) {
  const auto hyperbolic = HamiltonianSystem::general("p*q");
  const OrbitTrace t = simulate(hyperbolic, SchemeKind::ImplicitMidpoint, {1, 1}, 2.0);
  ASSERT_TRUE(t.solver_failed());
  EXPECT_EQ(std::get<SolverFailed>(t.verdict).step, 0u);
}

TEST(Simulate, MidpointHarmonicLargeSteps) {
  const auto harmonic = HamiltonianSystem::general("p^2/2 + q^2/2");
  for (double tau : {10.0, 100.0}) {
    const OrbitTrace t = simulate(harmonic, SchemeKind::ImplicitMidpoint, {0.1, 0}, tau);
    ASSERT_TRUE(t.bounded());
    EXPECT_NEAR(std::get<Bounded>(t.verdict).max_radius, 0.1, 1e-9);
  }
}

TEST(HamiltonianDrift, Examples) {
  const auto harmonic = HamiltonianSystem::separable("p^2/2", "q^2/2");
  const OrbitTrace t = simulate(harmonic, SchemeKind::Yoshida2, {1, 0}, 0.1, {10000, 1e6, 1});
  EXPECT_LE(hamiltonian_drift(harmonic, t), 5e-3);

  const OrbitTrace none = simulate(harmonic, SchemeKind::EulerB, {1, 0}, 0.1, {0, 1e6, 1});
  EXPECT_EQ(none.states.size(), 1u);
  EXPECT_EQ(hamiltonian_drift(harmonic, none), 0.0);

  const OrbitTrace bad = simulate(harmonic, SchemeKind::EulerB, {0.1, 0}, 2.1);
  EXPECT_GT(hamiltonian_drift(harmonic, bad), 1e10);

  const auto newton = HamiltonianSystem::newtonian("-q");
  EXPECT_THROW(hamiltonian_drift(newton, simulate(newton, SchemeKind::EulerB, {1, 0}, 0.1, {10, 1e6, 1})), Error);
}

// Near every catalog centre, tau with a clear linear verdict produces the
// matching nonlinear orbit behaviour.
TEST(Simulate, LinearVerdictConsistency) {
  int checked = 0;
  for (const auto& entry : catalog()) {
    for (const auto& eq : find_equilibria(entry.system).points) {
      if (eq.kind != EquilibriumKind::Center) continue;
      for (SchemeKind k : kAllSchemes) {
        if (!applicable(k, entry.system.system_class())) continue;
        for (double tau : {0.3, 0.9, 1.5, 1.9, 2.1, 3.0}) {
          const double trace = propagator(k, eq.A, tau).S.trace();
          const bool holds = std::abs(trace) <= 1.9;
          const bool fails = std::abs(trace) >= 2.1;
          if (!holds && !fails) continue;
          const State x0{eq.point.p + 6e-4, eq.point.q + 8e-4};
          SimulationOptions opt;
          opt.escape_radius = 1.0;
          opt.origin = eq.point;
          opt.n_max = holds ? 100000 : 10000;
          const OrbitTrace t = simulate(entry.system, k, x0, tau, opt);
          if (holds) {
            EXPECT_TRUE(t.bounded()) << entry.name << " " << to_string(k) << " tau=" << tau;
          } else {
            EXPECT_TRUE(t.escaped()) << entry.name << " " << to_string(k) << " tau=" << tau;
          }
          ++checked;
        }
      }
    }
  }
  EXPECT_GT(checked, 40);
}

TEST(Simulate, PendulumSaddleOrbitsEscape) {
  const auto pendulum = HamiltonianSystem::newtonian("-sin(q)");
  for (SchemeKind k : kAllSchemes) {
    for (double tau : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      SimulationOptions opt;
      opt.escape_radius = 1.0;
      opt.origin = {0, kPi};
      opt.n_max = 100000;
      const OrbitTrace t = simulate(pendulum, k, {7e-4, kPi + 3e-4}, tau, opt);
      EXPECT_TRUE(t.escaped()) << to_string(k) << " tau=" << tau;
    }
  }
}

TEST(Simulate, Deterministic) {
  const auto pendulum = HamiltonianSystem::general("p^2/2 - cos(q)");
  for (SchemeKind k : {SchemeKind::ImplicitMidpoint}) {
    const OrbitTrace a = simulate(pendulum, k, {0.4, 1.0}, 0.37, {5000, 1e6, 7});
    const OrbitTrace b = simulate(pendulum, k, {0.4, 1.0}, 0.37, {5000, 1e6, 7});
    ASSERT_EQ(a.states.size(), b.states.size());
    EXPECT_EQ(std::memcmp(a.states.data(), b.states.data(), a.states.size() * sizeof(State)), 0);
    EXPECT_EQ(a.steps, b.steps);
  }
}

TEST(OrbitCsv, Layout) {
  const auto harmonic = HamiltonianSystem::separable("p^2/2", "q^2/2");
  const OrbitTrace t = simulate(harmonic, SchemeKind::EulerB, {1, 0}, 1.0, {2, 1e6, 1});
  std::ostringstream out;
  write_orbit_csv(out, harmonic, t);
  EXPECT_EQ(out.str(),
            "# scheme=euler-b tau=1 p0=1 q0=0 verdict=bounded (heuristic) n_steps=2 max_radius=1.4142135623730951\n"
            "step,p,q,H\n"
            "0,1,0,0.5\n"
            "1,1,1,1\n"
            "2,0,1,0.5\n");

  const auto newton = HamiltonianSystem::newtonian("-q");
  std::ostringstream blank;
  write_orbit_csv(blank, newton, simulate(newton, SchemeKind::EulerB, {1, 0}, 1.0, {1, 1e6, 1}));
  EXPECT_NE(blank.str().find("\n0,1,0,\n"), std::string::npos);
}
