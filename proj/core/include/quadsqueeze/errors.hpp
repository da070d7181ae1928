#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qs {

/// Raised when a numerical integration cannot proceed (non-finite state,
/// step-size underflow, step budget exhausted).
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double time, const std::string& what)
      : std::runtime_error(what + " at t=" + std::to_string(time)), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// Steady-state search failed to reach the requested residual.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(double residual, const std::string& what)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A stochastic trajectory produced a non-finite estimate.
class TrajectoryError : public std::runtime_error {
 public:
  TrajectoryError(std::size_t step, const std::string& what)
      : std::runtime_error(what + " at step " + std::to_string(step)), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Closed loop has a pole in the closed right half-plane.
class UnstableLoopError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Requested step-response specifications need negative feedback gains.
class UnreachableSpecError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace qs
