#pragma once

#include <stdexcept>
#include <string>

namespace alphabundle {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failures: map to CLI exit code 1.
struct NumericError : Error {
  using Error::Error;
};

// A point left the parameter domain, or sits too close to its boundary
// for a finite-difference stencil.
struct DomainError : NumericError {
  using NumericError::NumericError;
};

// Non-finite value met while evaluating an integrand or density.
struct EvaluationError : NumericError {
  using NumericError::NumericError;
};

// Fisher metric not positive definite (or numerically singular).
struct SingularMetricError : NumericError {
  using NumericError::NumericError;
};

// Frame matrix with |det| below threshold.
struct SingularFrameError : NumericError {
  using NumericError::NumericError;
};

// Horizontal lift collapsed (det A under threshold along the curve).
struct LiftDegeneracyError : NumericError {
  LiftDegeneracyError(const std::string& msg, double time)
      : NumericError(msg), t(time) {}
  double t;
};

// Strategy or operation not available for the given family.
struct UnsupportedError : Error {
  using Error::Error;
};

// Bad configuration (CLI / config file): exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

// Expression syntax error with a 1-based source position.
struct ParseError : ConfigError {
  ParseError(const std::string& msg, int position)
      : ConfigError(msg + " (at position " + std::to_string(position) + ")"),
        pos(position) {}
  int pos;
};

}  // namespace alphabundle
