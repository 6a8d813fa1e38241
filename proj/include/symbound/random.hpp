#pragma once

// Seeded generators for the property suites.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "symbound/expr.hpp"
#include "symbound/mat2.hpp"

namespace symbound {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

struct RandomExprOptions {
  int max_depth = 6;
  std::string variable = "x";
  bool allow_abs = false;
};

/// Random tree over one variable. Exponents are small constants so that most
/// trees are finite over moderate arguments; callers still skip samples that
/// hit a domain error.
inline Expr random_expr(Rng& rng, const RandomExprOptions& opt = {}, int depth = 0) {
  const bool leaf = depth >= opt.max_depth || (depth > 0 && uniform(rng, 0.0, 1.0) < 0.3);
  if (leaf) {
    if (uniform(rng, 0.0, 1.0) < 0.6) return Expr::variable(opt.variable);
    return Expr::constant(std::round(uniform(rng, -3.0, 3.0) * 4.0) / 4.0);
  }
  auto sub = [&] { return random_expr(rng, opt, depth + 1); };
  const int op = uniform_int(rng, 0, 7);
  // operands drawn in a fixed order so a seed always yields the same tree
  const Expr lhs = sub();
  if (op == 0) return -lhs;
  if (op == 5) {
    static constexpr double kExponents[] = {0.0, 1.0, 2.0, 3.0, 0.5, -1.0};
    return pow(lhs, Expr::constant(kExponents[uniform_int(rng, 0, 5)]));
  }
  if (op >= 6) {
    const int n = opt.allow_abs ? 10 : 9;
    return apply(kAllFuncs[uniform_int(rng, 0, n - 1)], lhs);
  }
  const Expr rhs = sub();
  switch (op) {
    case 1: return lhs + rhs;
    case 2: return lhs - rhs;
    case 3: return lhs * rhs;
    default: return lhs / rhs;
  }
}

/// [[a, b], [c, -a]] with entries uniform in [-range, range].
inline Mat2 random_trace_free(Rng& rng, double range = 5.0) {
  const double a = uniform(rng, -range, range);
  return {a, uniform(rng, -range, range), uniform(rng, -range, range), -a};
}

/// Separable-shape trace-free matrix [[0, b], [c, 0]].
inline Mat2 random_separable(Rng& rng, double range = 5.0) {
  return {0.0, uniform(rng, -range, range), uniform(rng, -range, range), 0.0};
}

/// det = 1 with entries of moderate size.
inline Mat2 random_unimodular(Rng& rng, double range = 3.0) {
  double a = 0.0;
  while (std::abs(a) < 0.25) a = uniform(rng, -range, range);
  const double b = uniform(rng, -range, range);
  const double c = uniform(rng, -range, range);
  return {a, b, c, (1.0 + b * c) / a};
}

/// Log-uniform step size in [lo, hi].
inline double random_tau(Rng& rng, double lo = 1e-3, double hi = 1e2) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

}  // namespace symbound
