#pragma once

// Closed-loop transfer function of the mean Q estimate and PID synthesis
// from classical second-order step specifications.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "quadsqueeze/model.hpp"

namespace qs {

/// G(s) = (b1 s + b0) / (a2 s^2 + a1 s + a0), the map from r to <pi(Q)>.
struct ClosedLoopTf {
  double b1 = 0.0;
  double b0 = 0.0;
  double a2 = 1.0;
  double a1 = 0.0;
  double a0 = 0.0;

  /// Denominator roots, ordered by decreasing real part.
  std::array<std::complex<double>, 2> poles() const;
  /// Numerator root, absent when b1 = 0.
  std::optional<double> zero() const;
  bool is_stable() const;

  bool operator==(const ClosedLoopTf&) const = default;
};

ClosedLoopTf transfer_function(const SystemParams& params, const PidParams& pid);

/// lim_{s->0} G(s). For a0 = b0 = 0 the common factor s is cancelled.
/// Throws UnstableLoopError when the loop is not asymptotically stable.
double final_value(const ClosedLoopTf& tf);

/// Fractional overshoot R in (0, 1) and 2 %-band settling time T_p > 0.
class StepSpecs {
 public:
  StepSpecs(double overshoot, double settling_time);
  double overshoot() const { return overshoot_; }
  double settling_time() const { return settling_time_; }

 private:
  double overshoot_;
  double settling_time_;
};

struct TunedPid {
  PidParams pid;  // mu = 0, so the loop has no zero
  double damping_ratio = 0.0;
  double natural_frequency = 0.0;
};

/// Matches the closed-loop denominator to s^2 + 2 zeta wn s + wn^2 with
/// R = exp(-pi zeta / sqrt(1 - zeta^2)) and T_p = 4 / (zeta wn). A nonzero
/// alpha_d rescales the denominator by 1 + alpha_d before matching.
/// Throws UnreachableSpecError when the required alpha_p is negative.
TunedPid tune_pid(const StepSpecs& specs, double gamma, double alpha_d = 0.0);

struct ResponseMetrics {
  double final_value = 0.0;
  double overshoot = 0.0;      // max(y) / y_inf - 1, clipped at 0
  double settling_time = 0.0;  // last exit from the +-band around y_inf
};

/// Metrics of a sampled response normalised by `final_value`.
ResponseMetrics response_metrics(std::span<const double> t, std::span<const double> y,
                                 double final_value, double band = 0.02);

struct StepResponse {
  std::vector<double> t;
  std::vector<double> y;
  ResponseMetrics metrics;  // from a dense internal grid, not from `t`
};

/// Closed-form response to r = theta(t) from rest, sampled on `grid`.
StepResponse step_response(const ClosedLoopTf& tf, std::span<const double> grid);

/// Closed-form unit-step response value at a single time.
double step_response_at(const ClosedLoopTf& tf, double t);

}  // namespace qs
