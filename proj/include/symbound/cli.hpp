#pragma once

// Command implementations behind tools/symbound. Each command takes a
// validated RunConfig, writes its files under `out_dir` and prints text to
// `text`. Files are written to a temp name and renamed into place.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "symbound/analyzer.hpp"
#include "symbound/config.hpp"
#include "symbound/errorprop.hpp"
#include "symbound/orbit.hpp"
#include "symbound/verify.hpp"

namespace symbound::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kSuccess = 0, kUsageError = 1, kVerificationFailure = 2 };

inline void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw Error(ErrorCode::ConfigError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

inline void write_effective_config(const RunConfig& cfg, const fs::path& out_dir) {
  write_file_atomic(out_dir / "effective.conf", to_config_text(cfg));
}

inline void check_schemes(const RunConfig& cfg) {
  for (SchemeKind s : cfg.effective_schemes()) require_applicable(s, cfg.system.cls);
}

/// Equilibria of the configured system. A suspected continuum is collapsed to
/// the located point nearest the centre of the search box.
inline EquilibriumSet located_equilibria(const HamiltonianSystem& sys, const EquilibriumSearch& search) {
  EquilibriumSet set = find_equilibria(sys, search);
  if (set.continuum_suspected && set.points.size() > 1) {
    const State centre{(search.p_lo + search.p_hi) / 2, (search.q_lo + search.q_hi) / 2};
    auto best = set.points.begin();
    for (auto it = set.points.begin(); it != set.points.end(); ++it) {
      if (distance(it->point, centre) < distance(best->point, centre)) best = it;
    }
    set.points = {*best};
  }
  return set;
}

inline void write_classification_table(std::ostream& text, const HamiltonianSystem& sys, const EquilibriumSet& set) {
  char line[200];
  text << "system " << to_string(sys.system_class()) << ": " << sys.description() << '\n';
  text << "equilibria: " << set.points.size() << (set.continuum_suspected ? " (continuum, one representative)" : "")
       << '\n';
  std::snprintf(line, sizeof line, "%4s %12s %12s %-7s %4s %14s\n", "#", "p0", "q0", "kind", "case", "detA");
  text << line;
  for (std::size_t i = 0; i < set.points.size(); ++i) {
    const Equilibrium& e = set.points[i];
    std::snprintf(line, sizeof line, "%4zu %12.6g %12.6g %-7s %4d %14.8g\n", i, e.point.p, e.point.q,
                  std::string(to_string(e.kind)).c_str(), theorem_case(e.kind), e.A.det());
    text << line;
  }
}

inline std::string scheme_file(const char* prefix, SchemeKind s, const char* ext) {
  return std::string(prefix) + std::string(to_string(s)) + ext;
}

// ---------------------------------------------------------------------------

inline int cmd_analyze(const RunConfig& cfg, const fs::path& out_dir, std::ostream& text) {
  check_schemes(cfg);
  const HamiltonianSystem sys = cfg.system.build();
  const EquilibriumSet set = located_equilibria(sys, cfg.equilibria);
  write_effective_config(cfg, out_dir);
  write_classification_table(text, sys, set);
  for (SchemeKind s : cfg.effective_schemes()) {
    PreservationReport report = preservation_report(sys, s, set.points, cfg.taus, cfg.bisection_tol);
    report.continuum_suspected = set.continuum_suspected;
    text << '\n';
    write_report_table(text, report);
    std::ostringstream csv;
    write_report_csv(csv, report);
    write_file_atomic(out_dir / scheme_file("report_", s, ".csv"), csv.str());
  }
  return kSuccess;
}

inline std::string orbit_file_name(SchemeKind s, std::optional<std::size_t> eq, std::size_t ic, double tau) {
  std::string name = "orbit_" + std::string(to_string(s));
  if (eq) name += "_eq" + std::to_string(*eq);
  return name + "_ic" + std::to_string(ic) + "_tau" + format_value(tau) + ".csv";
}

/// One orbit CSV per (scheme, tau, initial condition). With `offset` the
/// initial conditions are displacements from every equilibrium. Escapes and
/// solver failures are results, so the exit code stays 0.
inline int cmd_simulate(const RunConfig& cfg, const fs::path& out_dir, std::ostream& text) {
  check_schemes(cfg);
  const HamiltonianSystem sys = cfg.system.build();
  const SimulateSpec& sim = cfg.simulate;

  struct Start {
    std::optional<std::size_t> eq;
    std::size_t ic;
    State x0;
    State origin;
  };
  std::vector<Start> starts;
  if (sim.offset) {
    const EquilibriumSet set = located_equilibria(sys, cfg.equilibria);
    for (std::size_t e = 0; e < set.points.size(); ++e) {
      const State c = set.points[e].point;
      for (std::size_t i = 0; i < sim.initial_p.size(); ++i) {
        starts.push_back({e, i, {c.p + sim.initial_p[i], c.q + sim.initial_q[i]}, c});
      }
    }
  } else {
    for (std::size_t i = 0; i < sim.initial_p.size(); ++i) {
      starts.push_back({std::nullopt, i, {sim.initial_p[i], sim.initial_q[i]}, {}});
    }
  }
  write_effective_config(cfg, out_dir);

  for (SchemeKind s : cfg.effective_schemes()) {
    for (double tau : cfg.taus) {
      for (const Start& st : starts) {
        SimulationOptions opt = sim.options;
        opt.origin = st.origin;
        const OrbitTrace trace = simulate(sys, s, st.x0, tau, opt);
        std::ostringstream csv;
        write_orbit_csv(csv, sys, trace);
        const std::string name = orbit_file_name(s, st.eq, st.ic, tau);
        write_file_atomic(out_dir / name, csv.str());
        text << name << ": " << verdict_summary(trace) << '\n';
      }
    }
  }
  return kSuccess;
}

inline constexpr const char* kSweepCsvHeader = "row,scheme,p0,q0,tau,traceS,holds";

/// Per equilibrium and scheme: sampled (tau, trace S, holds) rows and one
/// "transition" row holding the bisection estimate of tau_max.
inline int cmd_sweep(const RunConfig& cfg, const fs::path& out_dir, std::ostream& text) {
  check_schemes(cfg);
  const HamiltonianSystem sys = cfg.system.build();
  const EquilibriumSet set = located_equilibria(sys, cfg.equilibria);
  const std::vector<double> taus = cfg.sweep.values();
  write_effective_config(cfg, out_dir);

  std::ostringstream csv;
  csv << kSweepCsvHeader << '\n';
  for (const Equilibrium& eq : set.points) {
    const std::string where = format_value(eq.point.p) + ',' + format_value(eq.point.q);
    for (SchemeKind s : cfg.effective_schemes()) {
      const std::string name(to_string(s));
      for (double tau : taus) {
        std::string trace = "nan", holds = "error";
        try {
          const Mat2 S = propagator(s, eq.A, tau).S;
          const PreservationVerdict v = check_theorem1(eq.A, S);
          trace = format_value(v.trace_S);
          holds = v.marginal ? "marginal" : v.condition_holds ? "true" : "false";
        } catch (const Error&) {
        }
        csv << "sample," << name << ',' << where << ',' << format_value(tau) << ',' << trace << ',' << holds << '\n';
      }
      const TauLimit closed = tau_max(s, eq);
      double hi = std::max(10.0, 2.0 * cfg.sweep.hi);
      if (closed.finite()) hi = std::max(hi, 2.0 * closed.value);
      std::string trace = "nan";
      double transition = std::nan("");
      try {
        transition = empirical_tau_max(s, eq, hi, cfg.bisection_tol);
        if (std::isfinite(transition)) trace = format_value(propagator(s, eq.A, transition).S.trace());
      } catch (const Error& e) {
        text << "transition " << name << " at (" << where << "): " << e.what() << '\n';
      }
      csv << "transition," << name << ',' << where << ',' << format_value(transition) << ',' << trace << ",boundary\n";
      text << name << " at (" << where << "): transition tau " << format_value(transition) << ", closed form "
           << format_value(closed.value) << '\n';
    }
  }
  write_file_atomic(out_dir / "sweep.csv", csv.str());
  return kSuccess;
}

inline constexpr const char* kErrorDemoCsvHeader = "n,iter_p,iter_q,closed_p,closed_q,norm,bound";

/// Tracks Y_{n+1} = S Y_n + eta by iteration and by the closed form. S is
/// taken from the config or, when absent, is the propagator of the first
/// scheme at the first equilibrium and the first tau.
inline int cmd_errordemo(const RunConfig& cfg, const fs::path& out_dir, std::ostream& text) {
  const ErrorDemoSpec& d = cfg.errordemo;
  Mat2 S;
  std::string source;
  if (!d.S.empty()) {
    S = {d.S[0], d.S[1], d.S[2], d.S[3]};
    source = "config";
  } else {
    check_schemes(cfg);
    const HamiltonianSystem sys = cfg.system.build();
    const EquilibriumSet set = located_equilibria(sys, cfg.equilibria);
    if (set.points.empty()) throw Error(ErrorCode::ConfigError, "errordemo: no equilibrium in the search box");
    const SchemeKind s = cfg.effective_schemes().front();
    S = propagator(s, set.points.front().A, cfg.taus.front()).S;
    source = std::string(to_string(s)) + " tau=" + format_value(cfg.taus.front());
  }
  const ErrorModel m = make_error_model(S, d.eta, d.y0);
  std::string status;
  try {
    const BoundednessResult b = error_bounded(m);
    status = std::string(b.bounded ? "true " : "false ") + b.explanation;
  } catch (const Error& e) {
    status = std::string("unknown ") + e.what();
  }
  double bound = kInf;
  try {
    bound = elliptic_error_bound(m);
  } catch (const Error&) {
  }
  write_effective_config(cfg, out_dir);

  std::ostringstream csv;
  csv << "# S=" << to_string(S) << " (" << source << ") bounded=" << status << '\n';
  csv << kErrorDemoCsvHeader << '\n';
  Vec2 y = m.y0;
  for (std::uint64_t n = 0;; ++n) {
    if (n % d.every == 0 || n == d.steps) {
      std::string closed = "nan,nan";
      try {
        const Vec2 c = closed_form_error(m, n);
        closed = format_value(c.x) + ',' + format_value(c.y);
      } catch (const Error&) {
      }
      csv << n << ',' << format_value(y.x) << ',' << format_value(y.y) << ',' << closed << ',' << format_value(y.norm())
          << ',' << format_value(bound) << '\n';
    }
    if (n == d.steps) break;
    y = m.S * y + m.eta;
  }
  write_file_atomic(out_dir / "errordemo.csv", csv.str());
  text << csv.str();
  return kSuccess;
}

inline int cmd_verify(std::uint64_t seed, const fs::path& out_dir, std::ostream& text, bool write_file) {
  const VerifySummary summary = run_verify(seed);
  std::ostringstream out;
  write_verify_summary(out, summary);
  if (write_file) write_file_atomic(out_dir / "verify.txt", out.str());
  text << out.str();
  return summary.ok() ? kSuccess : kVerificationFailure;
}

}  // namespace symbound::cli
