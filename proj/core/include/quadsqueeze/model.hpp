#pragma once

// Physical and feedback parameters of the back-action evading quadrature
// measurement, in units with hbar = 1 and omega_m = 1.

#include "quadsqueeze/covariance_state.hpp"
#include "quadsqueeze/setpoint.hpp"

namespace qs {

/// Cavity damping kappa, mechanical damping gamma, renormalized
/// optomechanical coupling G and bath occupation n_th.
class SystemParams {
 public:
  /// Throws std::invalid_argument unless kappa > 0, gamma > 0, g >= 0,
  /// n_th >= 0 (all finite).
  SystemParams(double kappa, double gamma, double g, double n_th = 0.0);

  double kappa() const { return kappa_; }
  double gamma() const { return gamma_; }
  double g() const { return g_; }
  double n_th() const { return n_th_; }

  /// n_th + 1/2, the thermal quadrature variance.
  double thermal_variance() const { return n_th_ + 0.5; }

  /// Coupling that realises a target back-action number for given rates.
  static double coupling_for_back_action(double n_ba, double kappa, double gamma);

  bool operator==(const SystemParams&) const = default;

 private:
  double kappa_;
  double gamma_;
  double g_;
  double n_th_;
};

/// Measurement back-action n_BA = 2 G^2 / (gamma kappa).
double back_action_number(const SystemParams& params);

/// PID gains acting on the filtered Q estimate, the proportional setpoint
/// weighting mu and the reference r(t).
class PidParams {
 public:
  /// No feedback, mu = 1, r = 0.
  PidParams() = default;

  /// Throws std::invalid_argument unless alpha_p >= 0, alpha_i >= 0,
  /// 1 + alpha_d > 0 and everything is finite.
  PidParams(double alpha_p, double alpha_i, double alpha_d, double mu = 1.0,
            SetpointSignal setpoint = {});

  double alpha_p() const { return alpha_p_; }
  double alpha_i() const { return alpha_i_; }
  double alpha_d() const { return alpha_d_; }
  double mu() const { return mu_; }
  const SetpointSignal& setpoint() const { return setpoint_; }

  /// 1 / (1 + alpha_d), the prefactor of the closed-loop Q filter.
  double derivative_scale() const { return 1.0 / (1.0 + alpha_d_); }

  PidParams with_setpoint(SetpointSignal setpoint) const;
  PidParams with_mu(double mu) const;

  bool operator==(const PidParams&) const = default;

 private:
  double alpha_p_ = 0.0;
  double alpha_i_ = 0.0;
  double alpha_d_ = 0.0;
  double mu_ = 1.0;
  SetpointSignal setpoint_;
};

/// Throws std::invalid_argument when 1 + alpha_d <= 0 or alpha_d is not finite.
void require_valid_derivative_gain(double alpha_d);

/// Filter initial condition: deterministic mean estimates plus a covariance.
struct InitialState {
  double q = 0.0;
  double p = 0.0;
  double xa = 0.0;
  double ya = 0.0;
  CovarianceState covariance = ground_covariance();

  static CovarianceState ground_covariance();
  static CovarianceState thermal_covariance(double n_th);

  static InitialState ground();
  static InitialState thermal(double n_th);
  static InitialState custom(const CovarianceState& covariance);

  InitialState with_means(double q, double p, double xa = 0.0, double ya = 0.0) const;

  bool operator==(const InitialState&) const = default;
};

struct VariancePair {
  double q = 0.0;
  double p = 0.0;
};

// Lowest-order stationary variances in G, gamma << kappa. These are
// perturbative in n_BA and are not clamped: V_Q may come out negative when
// n_BA (n_th + 1/2) is not small.

/// Conditional (filter) variances of Q and P.
VariancePair analytic_conditional_variances(const SystemParams& params, const PidParams& pid);

/// Unconditional variances, i.e. conditional plus ensemble excess noise.
VariancePair analytic_unconditional_variances(const SystemParams& params, const PidParams& pid);

/// The squeezing factor multiplying -4 n_BA (n_th + 1/2)^2 in the
/// unconditional Q variance.
double unconditional_squeezing_factor(double alpha_p, double alpha_d);

/// Derivative gain that maximises unconditional_squeezing_factor for a
/// given proportional gain: 1 / (1 + 2 alpha_p).
double optimal_derivative_gain(double alpha_p);

}  // namespace qs
