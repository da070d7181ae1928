#pragma once

#include "quadsqueeze/model.hpp"
#include "quadsqueeze/moments.hpp"

namespace qs {

struct Displacement {
  double q = 0.0;
  double p = 0.0;
};

/// Open-loop stationary quadrature shift (-f1/gamma, f2/gamma).
Displacement steady_displacement(const ExternalForce& force, double gamma);

struct DetectabilityReport {
  double t = 0.0;
  Displacement open_loop;    // force signal on the measured quadrature
  Displacement closed_loop;  // <pi(Q)>, <pi(P)> at t with feedback applied
  double vq = 0.0;           // unconditional Q variance at t
  /// |open_loop.q| / sqrt(vq): force signal over the (feedback-squeezed)
  /// Q uncertainty.
  double ratio = 0.0;
  /// |closed_loop.q| / sqrt(vq)
  double closed_loop_ratio = 0.0;
};

/// Runs the moment equations with the force applied from the thermal state
/// of `params` and reports the signal-to-uncertainty ratio at t_end.
DetectabilityReport detectability(const ExternalForce& force, const SystemParams& params,
                                  const PidParams& pid, double t_end, const OdeOptions& opts = {});

}  // namespace qs
