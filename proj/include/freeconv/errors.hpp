#pragma once

#include <stdexcept>
#include <string>

namespace freeconv {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (Im z <= 0, alpha out
/// of range, negative support where positivity is required, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition that depends on a mathematical fact about the
/// input (e.g. free divisibility) is not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver or quadrature did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Thrown by handles that cannot be analytically continued to the requested
/// point (e.g. subordination-based handles below the real axis).
class ContinuationUnavailable : public Error {
 public:
  using Error::Error;
};

}  // namespace freeconv
