#include "quadsqueeze/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qs {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

SystemParams::SystemParams(double kappa, double gamma, double g, double n_th)
    : kappa_(kappa), gamma_(gamma), g_(g), n_th_(n_th) {
  require(std::isfinite(kappa) && kappa > 0.0, "kappa must be finite and > 0");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be finite and > 0");
  require(std::isfinite(g) && g >= 0.0, "g must be finite and >= 0");
  require(std::isfinite(n_th) && n_th >= 0.0, "n_th must be finite and >= 0");
}

double SystemParams::coupling_for_back_action(double n_ba, double kappa, double gamma) {
  require(n_ba >= 0.0, "n_BA must be >= 0");
  return std::sqrt(0.5 * n_ba * gamma * kappa);
}

double back_action_number(const SystemParams& params) {
  return 2.0 * params.g() * params.g() / (params.gamma() * params.kappa());
}

void require_valid_derivative_gain(double alpha_d) {
  require(std::isfinite(alpha_d) && 1.0 + alpha_d > 0.0, "alpha_d must satisfy 1 + alpha_d > 0");
}

PidParams::PidParams(double alpha_p, double alpha_i, double alpha_d, double mu,
                     SetpointSignal setpoint)
    : alpha_p_(alpha_p), alpha_i_(alpha_i), alpha_d_(alpha_d), mu_(mu),
      setpoint_(std::move(setpoint)) {
  require(std::isfinite(alpha_p) && alpha_p >= 0.0, "alpha_p must be finite and >= 0");
  require(std::isfinite(alpha_i) && alpha_i >= 0.0, "alpha_i must be finite and >= 0");
  require_valid_derivative_gain(alpha_d);
  require(std::isfinite(mu), "mu must be finite");
}

PidParams PidParams::with_setpoint(SetpointSignal setpoint) const {
  PidParams out = *this;
  out.setpoint_ = std::move(setpoint);
  return out;
}

PidParams PidParams::with_mu(double mu) const {
  return PidParams(alpha_p_, alpha_i_, alpha_d_, mu, setpoint_);
}

CovarianceState InitialState::ground_covariance() { return thermal_covariance(0.0); }

CovarianceState InitialState::thermal_covariance(double n_th) {
  require(std::isfinite(n_th) && n_th >= 0.0, "n_th must be finite and >= 0");
  CovarianceState v;
  v.v_q = n_th + 0.5;
  v.v_p = n_th + 0.5;
  v.v_xa = 0.5;
  v.v_ya = 0.5;
  return v;
}

InitialState InitialState::ground() { return thermal(0.0); }

InitialState InitialState::thermal(double n_th) {
  InitialState s;
  s.covariance = thermal_covariance(n_th);
  return s;
}

InitialState InitialState::custom(const CovarianceState& covariance) {
  InitialState s;
  s.covariance = covariance;
  return s;
}

InitialState InitialState::with_means(double q, double p, double xa, double ya) const {
  InitialState s = *this;
  s.q = q;
  s.p = p;
  s.xa = xa;
  s.ya = ya;
  return s;
}

VariancePair analytic_conditional_variances(const SystemParams& params, const PidParams& pid) {
  const double n = params.thermal_variance();
  const double n_ba = back_action_number(params);
  const double d = pid.alpha_d();
  const double factor = (1.0 + 2.0 * d) / ((1.0 + d) * (1.0 + d));
  return {n - 4.0 * n_ba * factor * n * n, n + n_ba};
}

double unconditional_squeezing_factor(double alpha_p, double alpha_d) {
  return alpha_p / ((1.0 + alpha_p) * (1.0 + alpha_d)) +
         alpha_d / ((1.0 + alpha_d) * (1.0 + alpha_d));
}

double optimal_derivative_gain(double alpha_p) { return 1.0 / (1.0 + 2.0 * alpha_p); }

VariancePair analytic_unconditional_variances(const SystemParams& params, const PidParams& pid) {
  const double n = params.thermal_variance();
  const double n_ba = back_action_number(params);
  return {n - 4.0 * n_ba * n * n * unconditional_squeezing_factor(pid.alpha_p(), pid.alpha_d()),
          n + n_ba};
}

}  // namespace qs
