#pragma once

// Conditional covariance (Riccati) dynamics of the quantum Kalman filter.
// Only the derivative gain enters: proportional and integral action apply a
// known force and leave the estimate uncertainty untouched.

#include <span>
#include <vector>

#include "quadsqueeze/covariance_state.hpp"
#include "quadsqueeze/model.hpp"
#include "quadsqueeze/ode.hpp"

namespace qs {

/// Time derivative of the ten filter covariances. Throws
/// std::invalid_argument when 1 + alpha_d <= 0.
CovarianceState covariance_rhs(const CovarianceState& state, const SystemParams& params,
                               double alpha_d);

struct CovarianceSample {
  double t = 0.0;
  CovarianceState value;
};

/// Integrates the covariance equations from `init.covariance` up to t_end and
/// samples them at `grid` (sorted, inside [0, t_end]).
std::vector<CovarianceSample> integrate_covariances(const InitialState& init,
                                                    const SystemParams& params, double alpha_d,
                                                    double t_end, std::span<const double> grid,
                                                    const OdeOptions& opts = {});

struct SteadyStateDetail {
  CovarianceState by_integration;
  CovarianceState by_newton;
  double integration_time = 0.0;
  double residual = 0.0;  // max |rhs| at the Newton solution
  int newton_iterations = 0;
};

/// Stationary covariances: long integration from the thermal state, then
/// damped Newton on rhs = 0 seeded from the integration result. Throws
/// ConvergenceError if either stage fails.
SteadyStateDetail steady_state_detail(const SystemParams& params, double alpha_d,
                                      const OdeOptions& opts = {});

CovarianceState steady_state_covariances(const SystemParams& params, double alpha_d,
                                         const OdeOptions& opts = {});

}  // namespace qs
