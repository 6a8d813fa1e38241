#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "symbound/expr.hpp"
#include "symbound/parse.hpp"
#include "symbound/random.hpp"

using namespace symbound;

namespace {

double at(const Expr& e, double x) { return eval(e, {{"x", x}}); }

ErrorCode parse_error_code(std::string_view text) {
  try {
    parse(text, {"p", "q"});
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error for " << text;
  return ErrorCode::ConfigError;
}

// Fourth-order central difference; test-only oracle for differentiate().
double five_point_derivative(const Expr& e, double x, double h) {
  return (-at(e, x + 2 * h) + 8 * at(e, x + h) - 8 * at(e, x - h) + at(e, x - 2 * h)) / (12 * h);
}

}  // namespace

TEST(Parse, GrammarShapes) {
  EXPECT_EQ(to_sexpr(parse("p^2/2 + q^2/2")), "Add(Div(Pow(p,2),2),Div(Pow(q,2),2))");
  EXPECT_EQ(to_sexpr(parse("-cos(q)")), "Neg(cos(q))");
  EXPECT_EQ(to_sexpr(parse("-q^2")), "Neg(Pow(q,2))");
  EXPECT_EQ(to_sexpr(parse("a - b - c")), "Sub(Sub(a,b),c)");
  EXPECT_EQ(to_sexpr(parse("a / b * c")), "Mul(Div(a,b),c)");
  EXPECT_EQ(to_sexpr(parse("2^-1")), "Pow(2,Neg(1))");
}

TEST(Parse, PowerIsRightAssociative) {
  const Expr e = parse("q^2^3");
  EXPECT_EQ(to_sexpr(e), "Pow(q,Pow(2,3))");
  EXPECT_EQ(eval(e, {{"q", 2.0}}), 256.0);
}

TEST(Parse, NumbersAndConstants) {
  EXPECT_DOUBLE_EQ(eval(parse("1.5e2 + .5"), {}), 150.5);
  EXPECT_DOUBLE_EQ(eval(parse("2*pi"), {}), 2 * M_PI);
  EXPECT_DOUBLE_EQ(eval(parse("2E-1"), {}), 0.2);
}

TEST(Parse, ErrorsCarryPositions) {
  EXPECT_EQ(parse_error_code("p + r"), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(parse_error_code("foo(q)"), ErrorCode::UnknownIdentifier);
  EXPECT_EQ(parse_error_code("(p + q"), ErrorCode::UnbalancedParens);
  EXPECT_EQ(parse_error_code("p + q)"), ErrorCode::UnbalancedParens);
  EXPECT_EQ(parse_error_code("p + * q"), ErrorCode::UnexpectedToken);
  EXPECT_EQ(parse_error_code(""), ErrorCode::UnexpectedToken);
  EXPECT_EQ(parse_error_code("sin + q"), ErrorCode::UnexpectedToken);
  EXPECT_EQ(parse_error_code("p # q"), ErrorCode::UnexpectedToken);

  try {
    parse("p + r", {"p", "q"});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
  try {
    parse("p + (q", {"p", "q"});
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 4u);
  }
}

TEST(Eval, Examples) {
  EXPECT_EQ(eval(parse("p^2/2"), {{"p", 3.0}}), 4.5);
  EXPECT_EQ(eval(parse("-cos(q)"), {{"q", 0.0}}), -1.0);
}

TEST(Eval, DomainAndBindingErrors) {
  auto code = [](std::string_view text, Bindings b) {
    try {
      eval(parse(text), b);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::ConfigError;
  };
  EXPECT_EQ(code("sqrt(q)", {{"q", -1.0}}), ErrorCode::DomainError);
  EXPECT_EQ(code("log(q)", {{"q", -1.0}}), ErrorCode::DomainError);
  EXPECT_EQ(code("log(q)", {{"q", 0.0}}), ErrorCode::DomainError);
  EXPECT_EQ(code("q^0.5", {{"q", -2.0}}), ErrorCode::DomainError);
  EXPECT_EQ(code("1/q", {{"q", 0.0}}), ErrorCode::DomainError);
  EXPECT_EQ(code("p + q", {{"q", 0.0}}), ErrorCode::UnboundVariable);
  // integer exponents of negative bases stay real
  EXPECT_EQ(eval(parse("q^3"), {{"q", -2.0}}), -8.0);
}

TEST(Eval, Deterministic) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Expr e = random_expr(rng);
    const double x = uniform(rng, -2, 2);
    try {
      const double a = at(e, x);
      const double b = at(e, x);
      EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
    } catch (const Error&) {
    }
  }
}

TEST(Differentiate, Examples) {
  EXPECT_EQ(to_sexpr(differentiate(parse("q^2/2"), "q")), "q");
  EXPECT_EQ(to_sexpr(differentiate(parse("-cos(q)"), "q")), "sin(q)");
  const Expr d2 = differentiate(differentiate(parse("q^3"), "q"), "q");
  EXPECT_EQ(eval(d2, {{"q", 2.0}}), 12.0);

  // central difference of the first derivative, h = 1e-5; a plain second
  // difference of q^3 would lose ~eps/h^2 and miss 1e-6
  const Expr d1 = differentiate(parse("q^3"), "q");
  const double h = 1e-5;
  auto f = [&](double q) { return eval(d1, {{"q", q}}); };
  const double fd = (f(2 + h) - f(2 - h)) / (2 * h);
  EXPECT_NEAR(eval(d2, {{"q", 2.0}}), fd, 1e-6);
}

TEST(Differentiate, RejectsAbs) {
  try {
    differentiate(parse("abs(q) + q"), "q");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonDifferentiableNode);
  }
}

TEST(Differentiate, AllFunctionRules) {
  const char* cases[] = {"sin(x^2)",  "cos(2*x)",     "tan(x/3)",  "exp(-x^2)",   "log(1 + x^2)",
                         "sqrt(2+x)", "sinh(x)*x",    "cosh(x)/x", "tanh(3*x)",   "x^x",
                         "2^x",       "(1+x^2)^(-1)", "x/(1+x)",   "-(x - 3)^3"};
  for (const char* text : cases) {
    const Expr e = parse(text);
    const Expr d = differentiate(e, "x");
    for (double x : {0.3, 0.9, 1.7}) {
      const double fd = five_point_derivative(e, x, 1e-3);
      EXPECT_NEAR(at(d, x), fd, 1e-8 * (1 + std::abs(fd))) << text << " at " << x;
    }
  }
}

TEST(Differentiate, ClosedUnderDifferentiation) {
  Rng rng(11);
  for (int i = 0; i < 300; ++i) {
    Expr e = random_expr(rng);
    for (int k = 0; k < 2; ++k) {
      e = differentiate(e, "x");
      EXPECT_FALSE(contains_func(e, Func::Abs));
    }
  }
}

// |d/dx e - fd| <= 1e-5 (1 + |value|) for 1000 random trees (depth <= 6).
TEST(Differentiate, PropertyMatchesFiniteDifferences) {
  Rng rng(2024);
  int accepted = 0, attempts = 0;
  while (accepted < 1000 && attempts < 20000) {
    ++attempts;
    const Expr e = random_expr(rng);
    const double x = uniform(rng, -2.0, 2.0);
    double fd = 0, fd_half = 0, value = 0;
    try {
      value = at(e, x);
      fd = five_point_derivative(e, x, 1e-3);
      fd_half = five_point_derivative(e, x, 5e-4);
    } catch (const Error&) {
      continue;  // stencil crosses a domain boundary
    }
    if (!std::isfinite(value) || std::abs(value) > 1e6 || !std::isfinite(fd)) continue;
    // the oracle itself is unreliable next to poles; halving h must agree
    if (std::abs(fd - fd_half) > 1e-7 * (1 + std::abs(fd))) continue;
    ++accepted;
    const double d = at(differentiate(e, "x"), x);
    ASSERT_NEAR(d, fd, 1e-5 * (1 + std::abs(fd))) << to_string(e) << " at x=" << x;
  }
  EXPECT_EQ(accepted, 1000) << "after " << attempts << " attempts";
}

TEST(Simplify, Examples) {
  const Expr q = Expr::variable("q");
  EXPECT_EQ(to_sexpr(simplify(Expr::constant(1) * q)), "q");
  EXPECT_EQ(to_sexpr(simplify(Expr::constant(2) + Expr::constant(3))), "5");
  EXPECT_EQ(to_sexpr(simplify(Expr::constant(0) * apply(Func::Sin, q))), "0");
  EXPECT_EQ(to_sexpr(simplify(q + Expr::constant(0))), "q");
  EXPECT_EQ(to_sexpr(simplify(pow(q, Expr::constant(1)))), "q");
  EXPECT_EQ(to_sexpr(simplify(-(-q))), "q");
  // invalid constant subtrees are not folded
  EXPECT_EQ(to_sexpr(simplify(apply(Func::Log, Expr::constant(-1)))), "log(-1)");
}

TEST(Simplify, PropertyPreservesValue) {
  Rng rng(99);
  int checked = 0;
  for (int i = 0; i < 3000 && checked < 1000; ++i) {
    const Expr e = random_expr(rng);
    const double x = uniform(rng, -2.0, 2.0);
    double original = 0;
    try {
      original = at(e, x);
    } catch (const Error&) {
      continue;
    }
    if (!std::isfinite(original)) continue;
    ++checked;
    const double simplified = at(simplify(e), x);
    ASSERT_NEAR(simplified, original, 1e-12 * std::max(1.0, std::abs(original))) << to_string(e) << " at " << x;
  }
  EXPECT_EQ(checked, 1000);
}

TEST(Print, PropertyRoundTrip) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Expr e = random_expr(rng, {6, "x", true});
    const Expr back = parse(to_string(e));
    for (int k = 0; k < 3; ++k) {
      const double x = uniform(rng, -2.0, 2.0);
      double a = 0, b = 0;
      bool a_ok = true, b_ok = true;
      try {
        a = at(e, x);
      } catch (const Error&) {
        a_ok = false;
      }
      try {
        b = at(back, x);
      } catch (const Error&) {
        b_ok = false;
      }
      ASSERT_EQ(a_ok, b_ok) << to_string(e);
      if (a_ok) ASSERT_TRUE(a == b || (std::isnan(a) && std::isnan(b))) << to_string(e);
    }
  }
}
