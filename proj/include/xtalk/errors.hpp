#pragma once

#include <stdexcept>
#include <string>

namespace xtalk {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition (bad config, index out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of budget. Carries the last residual it saw.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  [[nodiscard]] double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// The ion string has a transverse mode with nu^2 <= 0 (zigzag instability).
class UnstableStringError : public Error {
 public:
  using Error::Error;
};

/// A pulse loop does not return every mode to the phase-space origin.
class ClosureError : public Error {
 public:
  ClosureError(const std::string& what, std::size_t loop, double residual)
      : Error(what), loop_(loop), residual_(residual) {}
  [[nodiscard]] std::size_t loop() const { return loop_; }
  [[nodiscard]] double residual() const { return residual_; }

 private:
  std::size_t loop_;
  double residual_;
};

/// A design problem has no solution within tolerance or budget.
class InfeasibleDesign : public Error {
 public:
  InfeasibleDesign(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  [[nodiscard]] double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace xtalk
