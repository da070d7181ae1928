#pragma once

// Single-record stochastic filter trajectories driven by an ideal
// innovations Wiener process, and seeded Monte-Carlo ensembles of them.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "quadsqueeze/covariance_state.hpp"
#include "quadsqueeze/model.hpp"
#include "quadsqueeze/moments.hpp"

namespace qs {

struct TrajectoryState {
  double pi_q = 0.0;
  double pi_p = 0.0;
  double pi_xa = 0.0;
  double pi_ya = 0.0;
  double err_int = 0.0;  // int_0^t (r - pi(Q))
  double t = 0.0;

  bool operator==(const TrajectoryState&) const = default;
};

/// One Euler-Maruyama step of length dt with innovation increment dW,
/// using covariances (and r) evaluated at state.t.
TrajectoryState step_trajectory(const TrajectoryState& state, const CovarianceState& cov,
                                const SystemParams& params, const PidParams& pid, double dW,
                                double dt, const ExternalForce& force = {});

struct EnsembleConfig {
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  /// Upper bound on the Euler-Maruyama step; 0 selects 0.01 / kappa.
  double max_dt = 0.0;
  /// Worker threads; 0 uses std::thread::hardware_concurrency().
  unsigned threads = 0;
  ExternalForce force;
};

struct EnsembleStats {
  std::vector<double> t;
  std::vector<double> mean_q;
  std::vector<double> var_q;
  std::vector<double> mean_p;
  std::vector<double> var_p;
  std::size_t trajectories = 0;  // requested
  std::size_t used = 0;          // finished without abort
  std::size_t aborted = 0;
  std::uint64_t seed = 0;
};

/// Time nodes of the fixed-step lattice used by run_ensemble: every grid
/// time and setpoint breakpoint is a node, and consecutive nodes are at
/// most max_dt apart.
std::vector<double> ensemble_lattice(double t_end, std::span<const double> grid,
                                     const SetpointSignal& setpoint, double max_dt);

/// Runs `config.trajectories` independent records. Trajectory k draws its
/// innovations from a stream keyed by (seed, k), and the reduction runs in
/// trajectory order, so results do not depend on the thread count. Throws
/// TrajectoryError when more than 0.1 % of trajectories abort.
EnsembleStats run_ensemble(const InitialState& init, const SystemParams& params,
                           const PidParams& pid, double t_end, std::span<const double> grid,
                           const EnsembleConfig& config);

/// Ensemble estimates of pi(Q) next to the moment-equation predictions on
/// the same grid, with z-scores (difference over Monte-Carlo standard error).
struct EnsembleComparison {
  std::vector<double> t;
  std::vector<double> ens_mean_q;
  std::vector<double> ens_var_q;
  std::vector<double> ode_mean_q;
  std::vector<double> ode_excess_q;  // <pi(Q)^2> - <pi(Q)>^2
  std::vector<double> cond_vq;       // filter variance V_Q
  std::vector<double> z_mean;        // standard error sqrt(var / N)
  std::vector<double> z_var;         // standard error excess * sqrt(2 / (N - 1))
};

/// Pairs `stats` with moment samples taken on the same grid.
EnsembleComparison compare_with_moments(const EnsembleStats& stats,
                                        std::span<const MomentSample> moments);

/// Per-trajectory innovation stream: a Mersenne Twister seeded from
/// (seed, trajectory) through std::seed_seq.
class InnovationStream {
 public:
  InnovationStream(std::uint64_t seed, std::uint64_t trajectory);

  /// Standard normal variate.
  double next() { return normal_(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace qs
