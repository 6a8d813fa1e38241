#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symbound {

enum class ErrorCode {
  // expression front end
  UnknownIdentifier,
  UnbalancedParens,
  UnexpectedToken,
  UnboundVariable,
  DomainError,
  NonDifferentiableNode,
  // systems
  NotAnEquilibrium,
  NotTraceFree,
  // schemes
  ImplicitSolveFailed,
  NotApplicable,
  SingularCayley,
  ShapeMismatch,
  // analyzer / errorprop
  NotUnimodular,
  InconsistentPredicate,
  SingularResolvent,
  // cli
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::UnbalancedParens: return "UnbalancedParens";
    case ErrorCode::UnexpectedToken: return "UnexpectedToken";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::NonDifferentiableNode: return "NonDifferentiableNode";
    case ErrorCode::NotAnEquilibrium: return "NotAnEquilibrium";
    case ErrorCode::NotTraceFree: return "NotTraceFree";
    case ErrorCode::ImplicitSolveFailed: return "ImplicitSolveFailed";
    case ErrorCode::NotApplicable: return "NotApplicable";
    case ErrorCode::SingularCayley: return "SingularCayley";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NotUnimodular: return "NotUnimodular";
    case ErrorCode::InconsistentPredicate: return "InconsistentPredicate";
    case ErrorCode::SingularResolvent: return "SingularResolvent";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. The code is the
/// stable, machine-checkable part; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure carrying the byte offset into the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::size_t position, const std::string& message)
      : Error(code, message + " at offset " + std::to_string(position)), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace symbound
