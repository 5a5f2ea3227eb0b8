#pragma once

#include <stdexcept>
#include <string>

namespace slipflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or violated precondition on user input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A value left the admissible range of the perturbation regime
/// (e.g. the density band (0,2)).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double best_residual, int iterations)
      : Error(what), best_residual_(best_residual), iterations_(iterations) {}

  double best_residual() const { return best_residual_; }
  int iterations() const { return iterations_; }

 private:
  double best_residual_;
  int iterations_;
};

/// Backward characteristic tracing failed to reach the inflow plane.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace slipflow
