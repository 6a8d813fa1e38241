#pragma once

// Run configuration: a sectioned key = value text file.
//
//   # comment
//   [system]
//   class = separable
//   T = p^2/2
//   V = -cos(q)
//
//   [analysis]
//   schemes = [euler-b, yoshida2]
//   taus = [0.5, 1.9, 2.1]
//
// Values are strings, reals, integers or bracketed comma-separated lists of
// those. Every key is checked against a fixed schema; unknown sections and
// keys are errors carrying file:line.

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "symbound/error.hpp"
#include "symbound/expr.hpp"
#include "symbound/orbit.hpp"
#include "symbound/schemes.hpp"
#include "symbound/systems.hpp"

namespace symbound {

struct SystemSpec {
  SystemClass cls = SystemClass::General;
  std::string H, T, V, g;

  HamiltonianSystem build() const {
    switch (cls) {
      case SystemClass::General: return HamiltonianSystem::general(H);
      case SystemClass::Separable: return HamiltonianSystem::separable(T, V);
      case SystemClass::Newtonian: return HamiltonianSystem::newtonian(g);
    }
    throw Error(ErrorCode::ConfigError, "bad system class");
  }
};

struct SweepSpec {
  double lo = 0.1;
  double hi = 4.0;
  int count = 40;
  bool log_spacing = false;

  std::vector<double> values() const {
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
      const double t = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      out.push_back(log_spacing ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo));
    }
    return out;
  }
};

struct SimulateSpec {
  SimulationOptions options;
  /// Initial conditions; with `offset` they are displacements from every
  /// equilibrium and radii are measured from that equilibrium.
  std::vector<double> initial_p{1e-3};
  std::vector<double> initial_q{0.0};
  bool offset = true;
};

struct ErrorDemoSpec {
  /// Row-major S; empty means "propagator of the first scheme at the first
  /// equilibrium and first tau".
  std::vector<double> S;
  Vec2 eta{1e-3, 0.0};
  Vec2 y0{0.0, 0.0};
  std::uint64_t steps = 1000;
  std::uint64_t every = 100;
};

struct RunConfig {
  SystemSpec system;
  std::vector<SchemeKind> schemes;  // empty: every scheme applicable to the system
  std::vector<double> taus{0.1, 0.5, 1.0, 1.9, 2.1};
  double bisection_tol = 1e-9;
  EquilibriumSearch equilibria;
  SweepSpec sweep;
  SimulateSpec simulate;
  ErrorDemoSpec errordemo;
  std::string output_dir = "out";

  std::vector<SchemeKind> effective_schemes() const {
    if (!schemes.empty()) return schemes;
    std::vector<SchemeKind> out;
    for (SchemeKind s : kAllSchemes) {
      if (applicable(s, system.cls)) out.push_back(s);
    }
    return out;
  }
};

class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& message)
      : Error(ErrorCode::ConfigError, where + ": " + message) {}
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::string unquote(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_list(const std::string& raw, const std::string& where) {
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') throw ConfigError(where, "expected a [list]");
  std::vector<std::string> items;
  const std::string body = trim(std::string_view(raw).substr(1, raw.size() - 2));
  if (body.empty()) return items;
  std::size_t start = 0;
  for (;;) {
    const auto comma = body.find(',', start);
    const std::string item = unquote(trim(std::string_view(body).substr(start, comma - start)));
    if (item.empty()) throw ConfigError(where, "empty list item");
    items.push_back(item);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return items;
}

inline double parse_real(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  const char* begin = s.c_str();
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(begin, &end);
  if (s.empty() || end != begin + s.size() || errno == ERANGE || !std::isfinite(v)) {
    throw ConfigError(where, "expected a real, got '" + s + "'");
  }
  return v;
}

inline std::uint64_t parse_count(const std::string& s, const std::string& where) {
  if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(where, "expected a non-negative integer, got '" + s + "'");
  }
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ConfigError(where, "integer out of range: '" + s + "'");
  }
}

inline std::vector<double> parse_reals(const std::string& raw, const std::string& where) {
  std::vector<double> out;
  for (const auto& item : split_list(raw, where)) out.push_back(parse_real(item, where));
  return out;
}

inline Vec2 parse_pair(const std::string& raw, const std::string& where) {
  const auto v = parse_reals(raw, where);
  if (v.size() != 2) throw ConfigError(where, "expected a list of two reals");
  return {v[0], v[1]};
}

inline bool parse_bool(const std::string& s, const std::string& where) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ConfigError(where, "expected true or false, got '" + s + "'");
}

template <class T>
std::string join(const std::vector<T>& items, auto&& fmt) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += fmt(items[i]);
  }
  return out + "]";
}

}  // namespace detail

/// Parses config text. `source` names the file in error messages.
inline RunConfig parse_config(std::string_view text, const std::string& source = "<config>") {
  using namespace detail;
  RunConfig cfg;
  std::string section;
  std::map<std::string, std::string> seen;  // "section.key" -> first location
  std::optional<std::string> class_where, h_where, t_where, v_where, g_where;
  bool have_class = false;

  std::istringstream in{std::string(text)};
  std::string raw_line;
  int line_no = 0;
  while (std::getline(in, raw_line)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string line = trim(raw_line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));

    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "malformed section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      static const char* kSections[] = {"system", "analysis", "equilibria", "sweep", "simulate", "errordemo", "output"};
      if (std::find(std::begin(kSections), std::end(kSections), section) == std::end(kSections)) {
        throw ConfigError(where, "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = unquote(trim(std::string_view(line).substr(eq + 1)));
    if (section.empty()) throw ConfigError(where, "key '" + key + "' outside any section");
    const std::string full = section + "." + key;
    if (auto it = seen.find(full); it != seen.end()) {
      throw ConfigError(where, "duplicate key " + full + " (first at " + it->second + ")");
    }
    seen[full] = where;
    auto unknown = [&] { return ConfigError(where, "unknown key '" + key + "' in [" + section + "]"); };

    if (section == "system") {
      if (key == "class") {
        if (value == "general") cfg.system.cls = SystemClass::General;
        else if (value == "separable") cfg.system.cls = SystemClass::Separable;
        else if (value == "newtonian") cfg.system.cls = SystemClass::Newtonian;
        else throw ConfigError(where, "class must be general, separable or newtonian");
        have_class = true;
        class_where = where;
      } else if (key == "H") {
        cfg.system.H = value;
        h_where = where;
      } else if (key == "T") {
        cfg.system.T = value;
        t_where = where;
      } else if (key == "V") {
        cfg.system.V = value;
        v_where = where;
      } else if (key == "g") {
        cfg.system.g = value;
        g_where = where;
      } else {
        throw unknown();
      }
    } else if (section == "analysis") {
      if (key == "schemes") {
        cfg.schemes.clear();
        for (const auto& name : split_list(value, where)) {
          const auto s = scheme_from_name(name);
          if (!s) throw ConfigError(where, "unknown scheme '" + name + "'");
          cfg.schemes.push_back(*s);
        }
      } else if (key == "taus") {
        cfg.taus = parse_reals(value, where);
        for (double t : cfg.taus) {
          if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError(where, "taus must be positive and finite");
        }
      } else if (key == "bisection_tol") {
        cfg.bisection_tol = parse_real(value, where);
        if (!(cfg.bisection_tol > 0.0)) throw ConfigError(where, "bisection_tol must be positive");
      } else {
        throw unknown();
      }
    } else if (section == "equilibria") {
      auto& e = cfg.equilibria;
      if (key == "p_lo") e.p_lo = parse_real(value, where);
      else if (key == "p_hi") e.p_hi = parse_real(value, where);
      else if (key == "q_lo") e.q_lo = parse_real(value, where);
      else if (key == "q_hi") e.q_hi = parse_real(value, where);
      else if (key == "grid") e.grid = static_cast<int>(parse_count(value, where));
      else if (key == "tol") e.tol = parse_real(value, where);
      else throw unknown();
    } else if (section == "sweep") {
      auto& s = cfg.sweep;
      if (key == "lo") s.lo = parse_real(value, where);
      else if (key == "hi") s.hi = parse_real(value, where);
      else if (key == "count") s.count = static_cast<int>(parse_count(value, where));
      else if (key == "spacing") {
        if (value != "linear" && value != "log") throw ConfigError(where, "spacing must be linear or log");
        s.log_spacing = value == "log";
      } else {
        throw unknown();
      }
    } else if (section == "simulate") {
      auto& s = cfg.simulate;
      if (key == "n_max") s.options.n_max = parse_count(value, where);
      else if (key == "escape_radius") s.options.escape_radius = parse_real(value, where);
      else if (key == "stride") s.options.stride = parse_count(value, where);
      else if (key == "initial_p") s.initial_p = parse_reals(value, where);
      else if (key == "initial_q") s.initial_q = parse_reals(value, where);
      else if (key == "offset") s.offset = parse_bool(value, where);
      else throw unknown();
    } else if (section == "errordemo") {
      auto& d = cfg.errordemo;
      if (key == "S") {
        d.S = parse_reals(value, where);
        if (d.S.size() != 4) throw ConfigError(where, "S needs four entries [a11, a12, a21, a22]");
      } else if (key == "eta") {
        d.eta = parse_pair(value, where);
      } else if (key == "y0") {
        d.y0 = parse_pair(value, where);
      } else if (key == "steps") {
        d.steps = parse_count(value, where);
      } else if (key == "every") {
        d.every = parse_count(value, where);
        if (d.every == 0) throw ConfigError(where, "every must be at least 1");
      } else {
        throw unknown();
      }
    } else if (section == "output") {
      if (key == "dir") cfg.output_dir = value;
      else throw unknown();
    }
  }

  // cross-field validation
  const std::string top = source + ":1";
  if (!have_class) throw ConfigError(top, "missing [system] class");
  auto need = [&](const std::optional<std::string>& w, const char* key) {
    if (!w) throw ConfigError(*class_where, std::string("class needs key ") + key);
  };
  auto forbid = [&](const std::optional<std::string>& w, const char* key) {
    if (w) throw ConfigError(*w, std::string("key ") + key + " does not belong to this class");
  };
  switch (cfg.system.cls) {
    case SystemClass::General: need(h_where, "H"); forbid(t_where, "T"); forbid(v_where, "V"); forbid(g_where, "g"); break;
    case SystemClass::Separable: need(t_where, "T"); need(v_where, "V"); forbid(h_where, "H"); forbid(g_where, "g"); break;
    case SystemClass::Newtonian: need(g_where, "g"); forbid(h_where, "H"); forbid(t_where, "T"); forbid(v_where, "V"); break;
  }
  try {
    cfg.system.build();
  } catch (const Error& e) {
    const auto& w = cfg.system.cls == SystemClass::General     ? h_where
                    : cfg.system.cls == SystemClass::Newtonian ? g_where
                                                               : (t_where ? t_where : v_where);
    throw ConfigError(w.value_or(top), e.what());
  }
  const auto& e = cfg.equilibria;
  if (!(e.p_lo < e.p_hi) || !(e.q_lo < e.q_hi)) throw ConfigError(top, "[equilibria] box is empty");
  if (e.grid < 4) throw ConfigError(top, "[equilibria] grid must be at least 4");
  if (!(cfg.sweep.lo > 0.0 && cfg.sweep.lo <= cfg.sweep.hi) || cfg.sweep.count < 1) {
    throw ConfigError(top, "[sweep] needs 0 < lo <= hi and count >= 1");
  }
  if (cfg.simulate.initial_p.size() != cfg.simulate.initial_q.size()) {
    throw ConfigError(top, "[simulate] initial_p and initial_q differ in length");
  }
  if (!(cfg.simulate.options.escape_radius > 0.0)) throw ConfigError(top, "[simulate] escape_radius must be positive");
  if (cfg.taus.empty()) throw ConfigError(top, "[analysis] taus is empty");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

/// Effective config with every default written out. parse_config of the
/// result reproduces `cfg` exactly.
inline std::string to_config_text(const RunConfig& cfg) {
  using detail::format_real;
  using detail::join;
  auto real = [](double v) { return std::isinf(v) ? std::string("inf") : format_real(v); };
  std::ostringstream out;
  out << "[system]\nclass = " << to_string(cfg.system.cls) << '\n';
  switch (cfg.system.cls) {
    case SystemClass::General: out << "H = " << cfg.system.H << '\n'; break;
    case SystemClass::Separable: out << "T = " << cfg.system.T << "\nV = " << cfg.system.V << '\n'; break;
    case SystemClass::Newtonian: out << "g = " << cfg.system.g << '\n'; break;
  }
  out << "\n[analysis]\n";
  if (!cfg.schemes.empty()) {
    out << "schemes = " << join(cfg.schemes, [](SchemeKind s) { return std::string(to_string(s)); }) << '\n';
  }
  out << "taus = " << join(cfg.taus, real) << '\n';
  out << "bisection_tol = " << real(cfg.bisection_tol) << '\n';
  const auto& e = cfg.equilibria;
  out << "\n[equilibria]\np_lo = " << real(e.p_lo) << "\np_hi = " << real(e.p_hi) << "\nq_lo = " << real(e.q_lo)
      << "\nq_hi = " << real(e.q_hi) << "\ngrid = " << e.grid << "\ntol = " << real(e.tol) << '\n';
  const auto& s = cfg.sweep;
  out << "\n[sweep]\nlo = " << real(s.lo) << "\nhi = " << real(s.hi) << "\ncount = " << s.count
      << "\nspacing = " << (s.log_spacing ? "log" : "linear") << '\n';
  const auto& m = cfg.simulate;
  out << "\n[simulate]\nn_max = " << m.options.n_max << "\nescape_radius = " << real(m.options.escape_radius)
      << "\nstride = " << m.options.stride << "\ninitial_p = " << join(m.initial_p, real)
      << "\ninitial_q = " << join(m.initial_q, real) << "\noffset = " << (m.offset ? "true" : "false") << '\n';
  const auto& d = cfg.errordemo;
  out << "\n[errordemo]\n";
  if (!d.S.empty()) out << "S = " << join(d.S, real) << '\n';
  out << "eta = [" << real(d.eta.x) << ", " << real(d.eta.y) << "]\ny0 = [" << real(d.y0.x) << ", " << real(d.y0.y)
      << "]\nsteps = " << d.steps << "\nevery = " << d.every << '\n';
  out << "\n[output]\ndir = " << cfg.output_dir << '\n';
  return out.str();
}

inline bool operator==(const SystemSpec& a, const SystemSpec& b) {
  return a.cls == b.cls && a.H == b.H && a.T == b.T && a.V == b.V && a.g == b.g;
}

/// Field-wise equality, used by the round-trip tests.
inline bool same_config(const RunConfig& a, const RunConfig& b) {
  const auto& ea = a.equilibria;
  const auto& eb = b.equilibria;
  const auto& ma = a.simulate;
  const auto& mb = b.simulate;
  return a.system == b.system && a.schemes == b.schemes && a.taus == b.taus && a.bisection_tol == b.bisection_tol &&
         ea.p_lo == eb.p_lo && ea.p_hi == eb.p_hi && ea.q_lo == eb.q_lo && ea.q_hi == eb.q_hi && ea.grid == eb.grid &&
         ea.tol == eb.tol && a.sweep.lo == b.sweep.lo && a.sweep.hi == b.sweep.hi && a.sweep.count == b.sweep.count &&
         a.sweep.log_spacing == b.sweep.log_spacing && ma.options.n_max == mb.options.n_max &&
         ma.options.escape_radius == mb.options.escape_radius && ma.options.stride == mb.options.stride &&
         ma.initial_p == mb.initial_p && ma.initial_q == mb.initial_q && ma.offset == mb.offset &&
         a.errordemo.S == b.errordemo.S && a.errordemo.eta == b.errordemo.eta && a.errordemo.y0 == b.errordemo.y0 &&
         a.errordemo.steps == b.errordemo.steps && a.errordemo.every == b.errordemo.every &&
         a.output_dir == b.output_dir;
}

}  // namespace symbound
