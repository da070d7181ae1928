#pragma once

// Ensemble averages of the filtered estimates. Means, the four quadratic
// moments needed for the mechanical variances and the integral-action
// memory sigma are co-integrated with the covariances on one adaptive step.

#include <array>
#include <span>
#include <vector>

#include "quadsqueeze/covariance_state.hpp"
#include "quadsqueeze/model.hpp"
#include "quadsqueeze/ode.hpp"

namespace qs {

/// Near-resonant drive F1 sin(wt) + F2 cos(wt); with hbar = 1 it shifts the
/// mean Q drift by -f1/2 and the mean P drift by +f2/2.
struct ExternalForce {
  double f1 = 0.0;
  double f2 = 0.0;
  bool operator==(const ExternalForce&) const = default;
};

struct MomentState {
  double m_q = 0.0;   // <pi(Q)>
  double m_p = 0.0;   // <pi(P)>
  double m_xa = 0.0;  // <pi(Xa)>
  double m_ya = 0.0;  // <pi(Ya)>
  double s_qq = 0.0;  // <pi(Q)^2>
  double s_pp = 0.0;  // <pi(P)^2>
  double s_xaxa = 0.0;
  double s_xap = 0.0;  // <pi(Xa) pi(P)>
  double sigma = 0.0;  // int_0^t dt' <pi_t(Q) pi_t'(Q)>
  double sigma_dot = 0.0;
  double aux_int_mq = 0.0;   // int_0^t <pi(Q)>
  double aux_int_r = 0.0;    // int_0^t r
  double aux_int_err = 0.0;  // int_0^t (r - <pi(Q)>)

  static constexpr std::size_t kSize = 13;

  /// Moments of a deterministic initial estimate; sigma_dot(0) = <pi_0(Q)^2>.
  static MomentState from_initial(const InitialState& init);

  std::array<double, kSize> to_array() const;
  static MomentState from_array(const std::array<double, kSize>& a);

  /// s_qq - m_q^2
  double excess_q() const { return s_qq - m_q * m_q; }
  /// s_pp - m_p^2
  double excess_p() const { return s_pp - m_p * m_p; }

  bool operator==(const MomentState&) const = default;
};

/// Time derivative of the moments at time t, with r(t) taken from the
/// setpoint. The setpoint is piecewise constant, so dr/dt vanishes here and
/// its impulses are applied by run_moments as jumps in sigma_dot.
MomentState moment_rhs(const MomentState& state, const CovarianceState& cov,
                       const SystemParams& params, const PidParams& pid,
                       const ExternalForce& force, double t);

/// Jump of sigma_dot across a setpoint discontinuity of size delta_r.
double sigma_dot_jump(const MomentState& state, const SystemParams& params, const PidParams& pid,
                      double delta_r);

struct MomentSample {
  double t = 0.0;
  CovarianceState cov;
  MomentState mom;
};

/// Co-integrates covariances and moments to t_end, restarting at every
/// setpoint breakpoint. Samples at `grid` (sorted, inside [0, t_end]);
/// samples at a breakpoint reflect the post-jump state.
std::vector<MomentSample> run_moments(const InitialState& init, const SystemParams& params,
                                      const PidParams& pid, const ExternalForce& force,
                                      double t_end, std::span<const double> grid,
                                      const OdeOptions& opts = {});

/// V = V_cond + excess noise, for Q and P.
VariancePair unconditional_variance(const CovarianceState& cov, const MomentState& mom);

struct StationaryVariances {
  VariancePair conditional;
  VariancePair unconditional;
  double time = 0.0;  // integration horizon that met the convergence test
};

/// Integrates from the thermal state with r = 0 until the unconditional
/// variances stop changing (relative change below rel_change per 5/gamma).
StationaryVariances stationary_variances(const SystemParams& params, const PidParams& pid,
                                         double rel_change = 1e-9, const OdeOptions& opts = {});

/// Evenly spaced times 0, t_end/(n-1), ..., t_end.
std::vector<double> uniform_grid(double t_end, std::size_t points);

}  // namespace qs
