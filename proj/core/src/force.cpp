#include "quadsqueeze/force.hpp"

#include <cmath>
#include <stdexcept>

namespace qs {

Displacement steady_displacement(const ExternalForce& force, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  return {-force.f1 / gamma, force.f2 / gamma};
}

DetectabilityReport detectability(const ExternalForce& force, const SystemParams& params,
                                  const PidParams& pid, double t_end, const OdeOptions& opts) {
  const double grid[] = {t_end};
  const auto run = run_moments(InitialState::thermal(params.n_th()), params, pid, force, t_end,
                               grid, opts);
  const MomentSample& last = run.back();

  DetectabilityReport report;
  report.t = t_end;
  report.open_loop = steady_displacement(force, params.gamma());
  report.closed_loop = {last.mom.m_q, last.mom.m_p};
  report.vq = unconditional_variance(last.cov, last.mom).q;
  const double spread = std::sqrt(report.vq);
  report.ratio = std::abs(report.open_loop.q) / spread;
  report.closed_loop_ratio = std::abs(report.closed_loop.q) / spread;
  return report;
}

}  // namespace qs
