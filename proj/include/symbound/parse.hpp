#pragma once

// Recursive-descent parser for the expression grammar:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          (right-associative)
//   primary := number | name | func '(' expr ')' | '(' expr ')'
//
// `pi` is a predefined constant. Function names are those of symbound::Func.

#include <cctype>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "symbound/error.hpp"
#include "symbound/expr.hpp"

namespace symbound {

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, const std::set<std::string>* allowed) : text_(text), allowed_(allowed) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ == text_.size()) {
      throw ParseError(ErrorCode::UnexpectedToken, pos_, "empty expression");
    }
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      if (text_[pos_] == ')') throw ParseError(ErrorCode::UnbalancedParens, pos_, "unmatched ')'");
      throw ParseError(ErrorCode::UnexpectedToken, pos_, "unexpected '" + std::string(1, text_[pos_]) + "'");
    }
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Expr parse_expr() {
    Expr lhs = parse_term();
    for (char c = peek(); c == '+' || c == '-'; c = peek()) {
      ++pos_;
      Expr rhs = parse_term();
      lhs = c == '+' ? lhs + rhs : lhs - rhs;
    }
    return lhs;
  }

  Expr parse_term() {
    Expr lhs = parse_unary();
    for (char c = peek(); c == '*' || c == '/'; c = peek()) {
      ++pos_;
      Expr rhs = parse_unary();
      lhs = c == '*' ? lhs * rhs : lhs / rhs;
    }
    return lhs;
  }

  Expr parse_unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -parse_unary();
    }
    if (c == '+') {
      ++pos_;
      return parse_unary();
    }
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (peek() == '^') {
      ++pos_;
      return pow(base, parse_unary());
    }
    return base;
  }

  void expect_close(std::size_t open_pos) {
    const char c = peek();
    if (c == ')') {
      ++pos_;
      return;
    }
    if (c == '\0') throw ParseError(ErrorCode::UnbalancedParens, open_pos, "unclosed '('");
    throw ParseError(ErrorCode::UnexpectedToken, pos_, "expected ')' but found '" + std::string(1, c) + "'");
  }

  Expr parse_primary() {
    const char c = peek();
    const std::size_t start = pos_;
    if (c == '\0') throw ParseError(ErrorCode::UnexpectedToken, pos_, "unexpected end of input");
    if (c == '(') {
      ++pos_;
      Expr inner = parse_expr();
      expect_close(start);
      return inner;
    }
    if (c == ')') throw ParseError(ErrorCode::UnbalancedParens, pos_, "unexpected ')'");
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name = parse_name();
      if (peek() == '(') {
        auto f = func_from_name(name);
        if (!f) throw ParseError(ErrorCode::UnknownIdentifier, start, "unknown function '" + name + "'");
        const std::size_t open = pos_++;
        Expr arg = parse_expr();
        expect_close(open);
        return apply(*f, arg);
      }
      if (func_from_name(name)) {
        throw ParseError(ErrorCode::UnexpectedToken, pos_, "function '" + name + "' needs an argument list");
      }
      if (name == "pi") return Expr::constant(std::numbers::pi);
      if (allowed_ && !allowed_->contains(name)) {
        throw ParseError(ErrorCode::UnknownIdentifier, start, "unknown identifier '" + name + "'");
      }
      return Expr::variable(std::move(name));
    }
    throw ParseError(ErrorCode::UnexpectedToken, pos_, "unexpected '" + std::string(1, c) + "'");
  }

  std::string parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
        pos_ = look;
        digits();
      }
    }
    const std::string lexeme(text_.substr(start, pos_ - start));
    if (lexeme == ".") throw ParseError(ErrorCode::UnexpectedToken, start, "malformed number");
    return Expr::constant(std::strtod(lexeme.c_str(), nullptr));
  }

  std::string_view text_;
  const std::set<std::string>* allowed_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `text`; any identifier that is not a function name or `pi` is a variable.
inline Expr parse(std::string_view text) { return detail::Parser(text, nullptr).parse_all(); }

/// Parses `text`, rejecting variables outside `allowed` with UnknownIdentifier.
inline Expr parse(std::string_view text, const std::set<std::string>& allowed) {
  return detail::Parser(text, &allowed).parse_all();
}

}  // namespace symbound
