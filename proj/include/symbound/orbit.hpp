#pragma once

// Discrete semi-orbits of the nonlinear one-step map with a finite-horizon
// escape heuristic. "Bounded" only means "stayed inside the escape radius for
// the whole horizon".

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "symbound/analyzer.hpp"
#include "symbound/schemes.hpp"
#include "symbound/systems.hpp"

namespace symbound {

struct Bounded {
  std::uint64_t n_steps = 0;
  double max_radius = 0.0;
};
struct Escaped {
  std::uint64_t step = 0;
  double radius = 0.0;
};
struct SolverFailed {
  std::uint64_t step = 0;
  std::string reason;
};

using OrbitVerdict = std::variant<Bounded, Escaped, SolverFailed>;

struct OrbitTrace {
  State initial;
  SchemeKind scheme = SchemeKind::EulerB;
  double tau = 0.0;
  std::vector<std::uint64_t> steps;  // step index of each recorded state
  std::vector<State> states;
  OrbitVerdict verdict;

  bool bounded() const { return std::holds_alternative<Bounded>(verdict); }
  bool escaped() const { return std::holds_alternative<Escaped>(verdict); }
  bool solver_failed() const { return std::holds_alternative<SolverFailed>(verdict); }
};

struct SimulationOptions {
  std::uint64_t n_max = 100000;
  double escape_radius = 1e6;
  /// 0 picks max(1, n_max / 10^4).
  std::uint64_t stride = 0;
  /// Radii are measured from this point.
  State origin{};
};

inline std::uint64_t effective_stride(const SimulationOptions& opt) {
  if (opt.stride > 0) return opt.stride;
  return std::max<std::uint64_t>(1, opt.n_max / 10000);
}

inline OrbitTrace simulate(const HamiltonianSystem& sys, SchemeKind scheme, const State& x0, double tau,
                           const SimulationOptions& opt = {}) {
  require_applicable(scheme, sys.system_class());
  const std::uint64_t stride = effective_stride(opt);
  auto radius = [&](const State& s) { return distance(s, opt.origin); };

  OrbitTrace trace;
  trace.initial = x0;
  trace.scheme = scheme;
  trace.tau = tau;
  trace.steps.push_back(0);
  trace.states.push_back(x0);

  State x = x0;
  double max_radius = radius(x0);
  for (std::uint64_t n = 1; n <= opt.n_max; ++n) {
    try {
      x = step(scheme, sys, x, tau);
    } catch (const Error& e) {
      trace.verdict = SolverFailed{n - 1, e.what()};
      return trace;
    }
    const double r = radius(x);
    // a non-finite radius is an escape as well
    if (!(r <= opt.escape_radius)) {
      trace.steps.push_back(n);
      trace.states.push_back(x);
      trace.verdict = Escaped{n, r};
      return trace;
    }
    max_radius = std::max(max_radius, r);
    if (n % stride == 0 || n == opt.n_max) {
      trace.steps.push_back(n);
      trace.states.push_back(x);
    }
  }
  trace.verdict = Bounded{opt.n_max, max_radius};
  return trace;
}

/// max |H(x_n) - H(x_0)| over the recorded states.
inline double hamiltonian_drift(const HamiltonianSystem& sys, const OrbitTrace& trace) {
  const double h0 = sys.energy(trace.initial);
  double drift = 0.0;
  for (const State& s : trace.states) drift = std::max(drift, std::abs(sys.energy(s) - h0));
  return drift;
}

inline std::string verdict_summary(const OrbitTrace& trace) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, Bounded>) {
          return "bounded (heuristic) n_steps=" + std::to_string(v.n_steps) + " max_radius=" + format_value(v.max_radius);
        } else if constexpr (std::is_same_v<V, Escaped>) {
          return "escaped (heuristic) step=" + std::to_string(v.step) + " radius=" + format_value(v.radius);
        } else {
          return "solver-failed step=" + std::to_string(v.step) + " reason=" + v.reason;
        }
      },
      trace.verdict);
}

/// Orbit CSV: "# <verdict>" line, then step,p,q,H with H blank when the
/// system has no energy function or it cannot be evaluated.
inline void write_orbit_csv(std::ostream& out, const HamiltonianSystem& sys, const OrbitTrace& trace) {
  out << "# scheme=" << to_string(trace.scheme) << " tau=" << format_value(trace.tau) << " p0="
      << format_value(trace.initial.p) << " q0=" << format_value(trace.initial.q) << " verdict=" << verdict_summary(trace)
      << '\n';
  out << "step,p,q,H\n";
  for (std::size_t i = 0; i < trace.states.size(); ++i) {
    const State& s = trace.states[i];
    out << trace.steps[i] << ',' << format_value(s.p) << ',' << format_value(s.q) << ',';
    if (sys.has_energy()) {
      try {
        out << format_value(sys.energy(s));
      } catch (const Error&) {
      }
    }
    out << '\n';
  }
}

}  // namespace symbound
