#include "quadsqueeze/covariance.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace qs {

CovarianceState covariance_rhs(const CovarianceState& v, const SystemParams& params,
                               double alpha_d) {
  require_valid_derivative_gain(alpha_d);
  const double k = params.kappa();
  const double gm = params.gamma();
  const double G = params.g();
  const double n = params.thermal_variance();
  const double d1 = 1.0 + alpha_d;
  const double gain_q = (1.0 + 2.0 * alpha_d) / (d1 * d1);
  const double gain_qx = (1.0 + 2.0 * alpha_d) / d1;
  const double half_decay = 0.5 * (k + gm);
  const double ya_excess = v.v_ya - 0.5;

  CovarianceState dv;
  dv.v_q = -gm * (v.v_q - n) - 2.0 * k * gain_q * v.v_yaq * v.v_yaq;
  dv.v_qp = G * v.v_xaq - gm * v.v_qp - 2.0 * k * gain_qx * v.v_yaq * v.v_yap;
  dv.v_p = 2.0 * G * v.v_xap - gm * (v.v_p - n) - 2.0 * k * v.v_yap * v.v_yap;
  dv.v_xa = -k * (v.v_xa - 0.5) - 2.0 * k * v.v_xaya * v.v_xaya;
  dv.v_xaya = G * v.v_xaq - k * v.v_xaya - 2.0 * k * v.v_xaya * ya_excess;
  dv.v_ya = 2.0 * G * v.v_yaq - k * ya_excess - 2.0 * k * ya_excess * ya_excess;
  dv.v_xaq = -half_decay * v.v_xaq - 2.0 * k * gain_qx * v.v_xaya * v.v_yaq;
  dv.v_xap = G * v.v_xa - half_decay * v.v_xap - 2.0 * k * v.v_xaya * v.v_yap;
  dv.v_yaq = G * v.v_q - half_decay * v.v_yaq - 2.0 * k / d1 * ya_excess * v.v_yaq -
             2.0 * k * alpha_d / d1 * v.v_yaq * v.v_yaq;
  dv.v_yap = G * (v.v_xaya + v.v_qp) - half_decay * v.v_yap - 2.0 * k * v.v_yap * ya_excess;
  return dv;
}

namespace {

using Solver = DormandPrince45<CovarianceState::kSize>;
using Vec = Solver::State;

auto make_rhs(const SystemParams& params, double alpha_d) {
  return [&params, alpha_d](double, const Vec& y, Vec& dy) {
    dy = covariance_rhs(CovarianceState::from_array(y), params, alpha_d).to_array();
  };
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

std::vector<CovarianceSample> integrate_covariances(const InitialState& init,
                                                    const SystemParams& params, double alpha_d,
                                                    double t_end, std::span<const double> grid,
                                                    const OdeOptions& opts) {
  require_valid_derivative_gain(alpha_d);
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  std::vector<CovarianceSample> out;
  out.reserve(grid.size());
  Solver::integrate(
      make_rhs(params, alpha_d), 0.0, init.covariance.to_array(), t_end, grid,
      [&out](double t, const Vec& y) { out.push_back({t, CovarianceState::from_array(y)}); },
      opts);
  return out;
}

SteadyStateDetail steady_state_detail(const SystemParams& params, double alpha_d,
                                      const OdeOptions& opts) {
  require_valid_derivative_gain(alpha_d);
  auto rhs = make_rhs(params, alpha_d);

  // Stage 1: relax from the thermal state in chunks of 5/gamma until no
  // component moves by more than ten integrator tolerances over a chunk.
  const double chunk = 5.0 / params.gamma();
  Vec y = InitialState::thermal_covariance(params.n_th()).to_array();
  double t = 0.0;
  bool settled = false;
  for (int i = 0; i < 400 && !settled; ++i) {
    const Vec next = Solver::integrate(rhs, t, y, t + chunk, {}, [](double, const Vec&) {}, opts);
    settled = true;
    for (std::size_t j = 0; j < y.size(); ++j) {
      if (std::abs(next[j] - y[j]) > 10.0 * (opts.rel_tol * std::abs(next[j]) + opts.abs_tol))
        settled = false;
    }
    y = next;
    t += chunk;
  }
  if (!settled) {
    Vec dy;
    rhs(t, y, dy);
    throw ConvergenceError(max_abs(dy), "covariance relaxation did not settle");
  }

  SteadyStateDetail detail;
  detail.by_integration = CovarianceState::from_array(y);
  detail.integration_time = t;

  // Stage 2: damped Newton on rhs(v) = 0, residual scaled by gamma.
  const double scale = 1.0 / params.gamma();
  auto residual = [&](const Vec& v) {
    Vec f;
    rhs(0.0, v, f);
    Eigen::Matrix<double, 10, 1> r;
    for (std::size_t j = 0; j < f.size(); ++j) r(static_cast<Eigen::Index>(j)) = f[j] * scale;
    return r;
  };

  Vec v = y;
  Eigen::Matrix<double, 10, 1> r = residual(v);
  int iter = 0;
  for (; iter < 50; ++iter) {
    Eigen::Matrix<double, 10, 10> jac;
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double h = 1e-7 * std::max(std::abs(v[j]), 1e-4);
      Vec vp = v, vm = v;
      vp[j] += h;
      vm[j] -= h;
      jac.col(static_cast<Eigen::Index>(j)) = (residual(vp) - residual(vm)) / (2.0 * h);
    }
    const Eigen::Matrix<double, 10, 1> delta = jac.fullPivLu().solve(-r);
    double lambda = 1.0;
    Vec trial;
    Eigen::Matrix<double, 10, 1> r_trial;
    for (int ls = 0; ls < 30; ++ls) {
      for (std::size_t j = 0; j < v.size(); ++j)
        trial[j] = v[j] + lambda * delta(static_cast<Eigen::Index>(j));
      r_trial = residual(trial);
      if (r_trial.lpNorm<Eigen::Infinity>() <= (1.0 - 0.25 * lambda) * r.lpNorm<Eigen::Infinity>())
        break;
      lambda *= 0.5;
    }
    const double step = lambda * delta.lpNorm<Eigen::Infinity>();
    if (r_trial.lpNorm<Eigen::Infinity>() <= r.lpNorm<Eigen::Infinity>()) {
      v = trial;
      r = r_trial;
    }
    if (step <= 1e-14 * std::max(1.0, max_abs(v)) || r.lpNorm<Eigen::Infinity>() < 1e-15) {
      ++iter;
      break;
    }
  }

  Vec f;
  rhs(0.0, v, f);
  detail.residual = max_abs(f);
  detail.newton_iterations = iter;
  detail.by_newton = CovarianceState::from_array(v);
  if (!(detail.residual <= 1e-9 * params.gamma() * std::max(1.0, max_abs(v))))
    throw ConvergenceError(detail.residual, "Newton refinement of the steady state failed");
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (std::abs(v[j] - y[j]) > 1e-4 * std::max(std::abs(y[j]), 1e-6))
      throw ConvergenceError(detail.residual, "Newton refinement left the relaxed branch");
  }
  return detail;
}

CovarianceState steady_state_covariances(const SystemParams& params, double alpha_d,
                                         const OdeOptions& opts) {
  return steady_state_detail(params, alpha_d, opts).by_newton;
}

}  // namespace qs
