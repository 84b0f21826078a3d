#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace varcert {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Syntax or index problem while parsing an expression; offset is the
// 0-based byte position in the source text where the problem was noticed.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : Error(msg + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Domain violation while evaluating an expression (division by zero,
// log of a non-positive value, sqrt of a negative value, bad power base)
// or an unbound variable.  Evaluation never returns a silent NaN.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Ill-formed problem data: inconsistent dimensions, box inclusion
// violations, malformed problem files, bad configuration values.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown that is not a certification verdict: singular
// z-Hessian along a trajectory, step underflow, inconsistent sweeps.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Why a field inversion failed.
enum class InvertFailure { NoConvergence, SingularJacobian, LambdaOutOfBall };

inline const char* to_string(InvertFailure f) {
  switch (f) {
    case InvertFailure::NoConvergence: return "no convergence";
    case InvertFailure::SingularJacobian: return "singular jacobian";
    case InvertFailure::LambdaOutOfBall: return "lambda outside parameter ball";
  }
  return "?";
}

class InvertError : public Error {
 public:
  InvertError(InvertFailure reason, const std::string& msg)
      : Error(msg), reason_(reason) {}
  InvertFailure reason() const { return reason_; }

 private:
  InvertFailure reason_;
};

// A point that must lie in the covered tube around the candidate could
// not be matched to any field member.
class UncoveredError : public Error {
 public:
  static constexpr std::size_t no_node = static_cast<std::size_t>(-1);
  explicit UncoveredError(const std::string& msg, std::size_t node = no_node)
      : Error(msg), node_(node) {}
  std::size_t node() const { return node_; }

 private:
  std::size_t node_;
};

// A finite-difference stencil for the exactness residual left the
// covered tube; the caller may shrink the step or skip the node.
class StencilError : public Error {
 public:
  using Error::Error;
};

}  // namespace varcert
