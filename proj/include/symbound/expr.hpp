#pragma once

// Scalar expression trees over named real variables.
//
// An Expr is an immutable handle to a shared node; copies are cheap and the
// tree is never mutated after construction, so a single Expr may be evaluated
// from several threads at once.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include "symbound/error.hpp"

namespace symbound {

enum class NodeKind { Constant, Variable, Neg, Add, Sub, Mul, Div, Pow, Func };

enum class Func { Sin, Cos, Tan, Exp, Log, Sqrt, Sinh, Cosh, Tanh, Abs };

inline constexpr Func kAllFuncs[] = {Func::Sin,  Func::Cos,  Func::Tan,  Func::Exp,  Func::Log,
                                     Func::Sqrt, Func::Sinh, Func::Cosh, Func::Tanh, Func::Abs};

constexpr std::string_view func_name(Func f) {
  switch (f) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Log: return "log";
    case Func::Sqrt: return "sqrt";
    case Func::Sinh: return "sinh";
    case Func::Cosh: return "cosh";
    case Func::Tanh: return "tanh";
    case Func::Abs: return "abs";
  }
  return "?";
}

inline std::optional<Func> func_from_name(std::string_view name) {
  for (Func f : kAllFuncs) {
    if (func_name(f) == name) return f;
  }
  return std::nullopt;
}

class Expr {
 public:
  /// Defaults to the constant 0.
  Expr() : Expr(constant(0.0)) {}

  static Expr constant(double value) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Constant;
    n->value = value;
    return Expr(std::move(n));
  }

  static Expr variable(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Variable;
    n->name = std::move(name);
    return Expr(std::move(n));
  }

  static Expr unary(NodeKind kind, const Expr& arg) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = arg.node_;
    return Expr(std::move(n));
  }

  static Expr binary(NodeKind kind, const Expr& lhs, const Expr& rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = lhs.node_;
    n->rhs = rhs.node_;
    return Expr(std::move(n));
  }

  static Expr apply(Func f, const Expr& arg) {
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::Func;
    n->func = f;
    n->lhs = arg.node_;
    return Expr(std::move(n));
  }

  NodeKind kind() const { return node_->kind; }
  double value() const { return node_->value; }
  const std::string& name() const { return node_->name; }
  Func func() const { return node_->func; }

  /// Operand of a unary node or left operand of a binary node.
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }
  Expr arg() const { return Expr(node_->lhs); }

  bool is_constant() const { return kind() == NodeKind::Constant; }
  bool is_constant(double v) const { return is_constant() && value() == v; }
  bool is_binary() const {
    switch (kind()) {
      case NodeKind::Add:
      case NodeKind::Sub:
      case NodeKind::Mul:
      case NodeKind::Div:
      case NodeKind::Pow: return true;
      default: return false;
    }
  }
  bool is_unary() const { return kind() == NodeKind::Neg || kind() == NodeKind::Func; }

  /// Identity of the shared node, not structural equality.
  bool same_node(const Expr& other) const { return node_ == other.node_; }

 private:
  struct Node {
    NodeKind kind = NodeKind::Constant;
    double value = 0.0;
    std::string name;
    Func func = Func::Sin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline Expr operator-(const Expr& a) { return Expr::unary(NodeKind::Neg, a); }
inline Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(NodeKind::Add, a, b); }
inline Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(NodeKind::Sub, a, b); }
inline Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(NodeKind::Mul, a, b); }
inline Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(NodeKind::Div, a, b); }
inline Expr pow(const Expr& a, const Expr& b) { return Expr::binary(NodeKind::Pow, a, b); }
inline Expr apply(Func f, const Expr& a) { return Expr::apply(f, a); }

// ---------------------------------------------------------------------------
// Structure queries

inline bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.same_node(b)) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::Constant: return a.value() == b.value();
    case NodeKind::Variable: return a.name() == b.name();
    case NodeKind::Func: return a.func() == b.func() && structurally_equal(a.arg(), b.arg());
    case NodeKind::Neg: return structurally_equal(a.arg(), b.arg());
    default: return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
}

inline void collect_variables(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case NodeKind::Constant: return;
    case NodeKind::Variable: out.insert(e.name()); return;
    case NodeKind::Neg:
    case NodeKind::Func: collect_variables(e.arg(), out); return;
    default:
      collect_variables(e.lhs(), out);
      collect_variables(e.rhs(), out);
  }
}

inline std::set<std::string> variables(const Expr& e) {
  std::set<std::string> out;
  collect_variables(e, out);
  return out;
}

inline bool depends_on(const Expr& e, std::string_view var) {
  switch (e.kind()) {
    case NodeKind::Constant: return false;
    case NodeKind::Variable: return e.name() == var;
    case NodeKind::Neg:
    case NodeKind::Func: return depends_on(e.arg(), var);
    default: return depends_on(e.lhs(), var) || depends_on(e.rhs(), var);
  }
}

inline bool contains_func(const Expr& e, Func f) {
  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Variable: return false;
    case NodeKind::Func: return e.func() == f || contains_func(e.arg(), f);
    case NodeKind::Neg: return contains_func(e.arg(), f);
    default: return contains_func(e.lhs(), f) || contains_func(e.rhs(), f);
  }
}

inline std::size_t node_count(const Expr& e) {
  if (e.is_binary()) return 1 + node_count(e.lhs()) + node_count(e.rhs());
  if (e.is_unary()) return 1 + node_count(e.arg());
  return 1;
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

/// Shortest decimal text that reads back to the same double.
inline std::string format_real(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

}  // namespace detail

/// Fully parenthesized infix text; parse(to_string(e)) evaluates identically to e.
inline std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant: {
      std::string s = detail::format_real(e.value());
      return std::signbit(e.value()) ? "(" + s + ")" : s;
    }
    case NodeKind::Variable: return e.name();
    case NodeKind::Neg: return "(-" + to_string(e.arg()) + ")";
    case NodeKind::Func: return std::string(func_name(e.func())) + "(" + to_string(e.arg()) + ")";
    case NodeKind::Add: return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
    case NodeKind::Sub: return "(" + to_string(e.lhs()) + " - " + to_string(e.rhs()) + ")";
    case NodeKind::Mul: return "(" + to_string(e.lhs()) + " * " + to_string(e.rhs()) + ")";
    case NodeKind::Div: return "(" + to_string(e.lhs()) + " / " + to_string(e.rhs()) + ")";
    case NodeKind::Pow: return "(" + to_string(e.lhs()) + " ^ " + to_string(e.rhs()) + ")";
  }
  return "?";
}

/// Constructor-style dump, e.g. Add(Div(Pow(p,2),2),q). Used by tests and diagnostics.
inline std::string to_sexpr(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Constant: return detail::format_real(e.value());
    case NodeKind::Variable: return e.name();
    case NodeKind::Neg: return "Neg(" + to_sexpr(e.arg()) + ")";
    case NodeKind::Func: return std::string(func_name(e.func())) + "(" + to_sexpr(e.arg()) + ")";
    case NodeKind::Add: return "Add(" + to_sexpr(e.lhs()) + "," + to_sexpr(e.rhs()) + ")";
    case NodeKind::Sub: return "Sub(" + to_sexpr(e.lhs()) + "," + to_sexpr(e.rhs()) + ")";
    case NodeKind::Mul: return "Mul(" + to_sexpr(e.lhs()) + "," + to_sexpr(e.rhs()) + ")";
    case NodeKind::Div: return "Div(" + to_sexpr(e.lhs()) + "," + to_sexpr(e.rhs()) + ")";
    case NodeKind::Pow: return "Pow(" + to_sexpr(e.lhs()) + "," + to_sexpr(e.rhs()) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Evaluation

using Bindings = std::map<std::string, double, std::less<>>;

namespace detail {

[[noreturn]] inline void domain_error(const std::string& what) {
  throw Error(ErrorCode::DomainError, what);
}

inline double apply_func(Func f, double x) {
  switch (f) {
    case Func::Sin: return std::sin(x);
    case Func::Cos: return std::cos(x);
    case Func::Tan: return std::tan(x);
    case Func::Exp: return std::exp(x);
    case Func::Log:
      if (!(x > 0.0)) domain_error("log of non-positive argument " + format_real(x));
      return std::log(x);
    case Func::Sqrt:
      if (x < 0.0) domain_error("sqrt of negative argument " + format_real(x));
      return std::sqrt(x);
    case Func::Sinh: return std::sinh(x);
    case Func::Cosh: return std::cosh(x);
    case Func::Tanh: return std::tanh(x);
    case Func::Abs: return std::abs(x);
  }
  return 0.0;
}

inline double checked_pow(double base, double exponent) {
  if (base < 0.0 && std::floor(exponent) != exponent) {
    domain_error("negative base " + format_real(base) + " with non-integer exponent");
  }
  if (base == 0.0 && exponent < 0.0) domain_error("zero raised to a negative power");
  return std::pow(base, exponent);
}

template <class Lookup>
double eval_node(const Expr& e, const Lookup& lookup) {
  double r = 0.0;
  switch (e.kind()) {
    case NodeKind::Constant: return e.value();
    case NodeKind::Variable: {
      std::optional<double> v = lookup(e.name());
      if (!v) throw Error(ErrorCode::UnboundVariable, "variable '" + e.name() + "' is not bound");
      return *v;
    }
    case NodeKind::Neg: return -eval_node(e.arg(), lookup);
    case NodeKind::Func: r = apply_func(e.func(), eval_node(e.arg(), lookup)); break;
    case NodeKind::Add: r = eval_node(e.lhs(), lookup) + eval_node(e.rhs(), lookup); break;
    case NodeKind::Sub: r = eval_node(e.lhs(), lookup) - eval_node(e.rhs(), lookup); break;
    case NodeKind::Mul: r = eval_node(e.lhs(), lookup) * eval_node(e.rhs(), lookup); break;
    case NodeKind::Div: {
      const double num = eval_node(e.lhs(), lookup);
      const double den = eval_node(e.rhs(), lookup);
      if (den == 0.0) domain_error("division by zero");
      r = num / den;
      break;
    }
    case NodeKind::Pow: {
      const double base = eval_node(e.lhs(), lookup);
      r = checked_pow(base, eval_node(e.rhs(), lookup));
      break;
    }
  }
  if (std::isnan(r)) domain_error("operation produced NaN");
  return r;
}

}  // namespace detail

/// Evaluates with a caller-supplied lookup `name -> std::optional<double>`.
template <class Lookup>
double eval_with(const Expr& e, const Lookup& lookup) {
  return detail::eval_node(e, lookup);
}

inline double eval(const Expr& e, const Bindings& bindings) {
  return eval_with(e, [&](const std::string& name) -> std::optional<double> {
    auto it = bindings.find(name);
    if (it == bindings.end()) return std::nullopt;
    return it->second;
  });
}

/// Fast path for phase-space expressions in p and q.
inline double eval_pq(const Expr& e, double p, double q) {
  return eval_with(e, [p, q](const std::string& name) -> std::optional<double> {
    if (name == "p") return p;
    if (name == "q") return q;
    return std::nullopt;
  });
}

// ---------------------------------------------------------------------------
// Simplification

/// Constant folding plus 0/1 identity elimination, bottom up. Folding is only
/// applied when the folded value is finite and free of domain errors, so a
/// foldable-but-invalid subtree such as log(-1) is left in place.
inline Expr simplify(const Expr& e) {
  auto fold = [](const Expr& candidate) -> std::optional<Expr> {
    try {
      const double v = eval(candidate, Bindings{});
      if (std::isfinite(v)) return Expr::constant(v);
    } catch (const Error&) {
    }
    return std::nullopt;
  };

  switch (e.kind()) {
    case NodeKind::Constant:
    case NodeKind::Variable: return e;
    case NodeKind::Neg: {
      Expr a = simplify(e.arg());
      if (a.is_constant()) return Expr::constant(-a.value());
      if (a.kind() == NodeKind::Neg) return a.arg();
      return -a;
    }
    case NodeKind::Func: {
      Expr a = simplify(e.arg());
      Expr out = apply(e.func(), a);
      if (a.is_constant()) {
        if (auto c = fold(out)) return *c;
      }
      return out;
    }
    default: break;
  }

  Expr a = simplify(e.lhs());
  Expr b = simplify(e.rhs());
  Expr out = Expr::binary(e.kind(), a, b);
  if (a.is_constant() && b.is_constant()) {
    if (auto c = fold(out)) return *c;
  }
  switch (e.kind()) {
    case NodeKind::Add:
      if (a.is_constant(0.0)) return b;
      if (b.is_constant(0.0)) return a;
      break;
    case NodeKind::Sub:
      if (b.is_constant(0.0)) return a;
      if (a.is_constant(0.0)) return b.is_constant() ? Expr::constant(-b.value()) : -b;
      break;
    case NodeKind::Mul:
      if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
      if (b.is_constant()) std::swap(a, b);  // constant factor goes left
      if (a.is_constant(1.0)) return b;
      if (a.is_constant(-1.0)) return -b;
      if (a.is_constant() && b.kind() == NodeKind::Mul && b.lhs().is_constant()) {
        return simplify(Expr::constant(a.value() * b.lhs().value()) * b.rhs());
      }
      return a * b;
    case NodeKind::Div:
      if (b.is_constant(1.0)) return a;
      if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
      if (b.is_constant() && b.value() != 0.0 && a.kind() == NodeKind::Mul && a.lhs().is_constant()) {
        return simplify(Expr::constant(a.lhs().value() / b.value()) * a.rhs());
      }
      break;
    case NodeKind::Pow:
      if (b.is_constant(1.0)) return a;
      if (b.is_constant(0.0)) return Expr::constant(1.0);
      break;
    default: break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace detail {

inline Expr derive(const Expr& e, std::string_view var) {
  const Expr zero = Expr::constant(0.0);
  const Expr one = Expr::constant(1.0);
  switch (e.kind()) {
    case NodeKind::Constant: return zero;
    case NodeKind::Variable: return e.name() == var ? one : zero;
    case NodeKind::Neg: return -derive(e.arg(), var);
    case NodeKind::Add: return derive(e.lhs(), var) + derive(e.rhs(), var);
    case NodeKind::Sub: return derive(e.lhs(), var) - derive(e.rhs(), var);
    case NodeKind::Mul: {
      const Expr f = e.lhs(), g = e.rhs();
      return derive(f, var) * g + f * derive(g, var);
    }
    case NodeKind::Div: {
      const Expr f = e.lhs(), g = e.rhs();
      if (!depends_on(g, var)) return derive(f, var) / g;
      return (derive(f, var) * g - f * derive(g, var)) / pow(g, Expr::constant(2.0));
    }
    case NodeKind::Pow: {
      const Expr f = e.lhs(), g = e.rhs();
      if (!depends_on(g, var)) {
        const Expr df = simplify(derive(f, var));
        if (df.is_constant(0.0)) return zero;
        // power rule; f^(g-1) keeps integer exponents integral for negative bases
        return g * pow(f, g - one) * df;
      }
      if (!depends_on(f, var)) return e * apply(Func::Log, f) * derive(g, var);
      return e * (derive(g, var) * apply(Func::Log, f) + g * derive(f, var) / f);
    }
    case NodeKind::Func: {
      const Expr u = e.arg();
      // a constant argument contributes nothing, even where f' is undefined
      const Expr du = simplify(derive(u, var));
      if (du.is_constant(0.0) && e.func() != Func::Abs) return zero;
      switch (e.func()) {
        case Func::Sin: return apply(Func::Cos, u) * du;
        case Func::Cos: return -apply(Func::Sin, u) * du;
        case Func::Tan: return du / pow(apply(Func::Cos, u), Expr::constant(2.0));
        case Func::Exp: return e * du;
        case Func::Log: return du / u;
        case Func::Sqrt: return du / (Expr::constant(2.0) * e);
        case Func::Sinh: return apply(Func::Cosh, u) * du;
        case Func::Cosh: return apply(Func::Sinh, u) * du;
        case Func::Tanh: return (one - pow(e, Expr::constant(2.0))) * du;
        case Func::Abs:
          throw Error(ErrorCode::NonDifferentiableNode, "abs(" + to_string(u) + ") is not differentiable");
      }
    }
  }
  return zero;
}

}  // namespace detail

/// Exact symbolic derivative with respect to `var`, simplified.
inline Expr differentiate(const Expr& e, std::string_view var) {
  if (contains_func(e, Func::Abs)) {
    throw Error(ErrorCode::NonDifferentiableNode, "expression contains abs: " + to_string(e));
  }
  return simplify(detail::derive(e, var));
}

}  // namespace symbound
