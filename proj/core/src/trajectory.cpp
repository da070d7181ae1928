#include "quadsqueeze/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "quadsqueeze/covariance.hpp"
#include "quadsqueeze/errors.hpp"

namespace qs {

InnovationStream::InnovationStream(std::uint64_t seed, std::uint64_t trajectory) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trajectory),
                    static_cast<std::uint32_t>(trajectory >> 32)};
  engine_.seed(seq);
}

TrajectoryState step_trajectory(const TrajectoryState& s, const CovarianceState& cov,
                                const SystemParams& params, const PidParams& pid, double dW,
                                double dt, const ExternalForce& force) {
  const double k = params.kappa();
  const double gm = params.gamma();
  const double G = params.g();
  const double a = pid.derivative_scale();
  const double kp = 0.5 * pid.alpha_p() * gm;
  const double ki = 0.25 * pid.alpha_i() * gm * gm;
  const double r = pid.setpoint().value(s.t);
  const double gain = std::sqrt(2.0 * k);

  TrajectoryState n;
  n.pi_q = s.pi_q +
           (a * (-0.5 * gm * s.pi_q + kp * (pid.mu() * r - s.pi_q) + ki * s.err_int) -
            0.5 * force.f1) * dt +
           a * gain * cov.v_yaq * dW;
  n.pi_p = s.pi_p + (G * s.pi_xa - 0.5 * gm * s.pi_p + 0.5 * force.f2) * dt + gain * cov.v_yap * dW;
  n.pi_xa = s.pi_xa - 0.5 * k * s.pi_xa * dt + gain * cov.v_xaya * dW;
  n.pi_ya = s.pi_ya + (G * s.pi_q - 0.5 * k * s.pi_ya) * dt + gain * (cov.v_ya - 0.5) * dW;
  n.err_int = s.err_int + (r - s.pi_q) * dt;
  n.t = s.t + dt;
  return n;
}

std::vector<double> ensemble_lattice(double t_end, std::span<const double> grid,
                                     const SetpointSignal& setpoint, double max_dt) {
  if (!(max_dt > 0.0)) throw std::invalid_argument("max_dt must be > 0");
  std::vector<double> nodes{0.0, t_end};
  nodes.insert(nodes.end(), grid.begin(), grid.end());
  for (double b : setpoint.breakpoints())
    if (b > 0.0 && b < t_end) nodes.push_back(b);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

  std::vector<double> lattice{0.0};
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i];
    const double b = nodes[i + 1];
    const auto steps = static_cast<std::size_t>(std::ceil((b - a) / max_dt * (1.0 - 1e-12)));
    const std::size_t n = std::max<std::size_t>(steps, 1);
    for (std::size_t j = 1; j < n; ++j)
      lattice.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(n));
    lattice.push_back(b);
  }
  return lattice;
}

namespace {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct Diffusion {
  double v_yaq, v_yap, v_xaya, v_ya;
};

}  // namespace

EnsembleStats run_ensemble(const InitialState& init, const SystemParams& params,
                           const PidParams& pid, double t_end, std::span<const double> grid,
                           const EnsembleConfig& config) {
  if (config.trajectories < 2) throw std::invalid_argument("ensemble needs at least 2 trajectories");
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      (!grid.empty() && (grid.front() < 0.0 || grid.back() > t_end)))
    throw std::invalid_argument("grid must be sorted and inside [0, t_end]");

  const double max_dt = config.max_dt > 0.0 ? config.max_dt : 0.01 / params.kappa();
  const std::vector<double> lattice = ensemble_lattice(t_end, grid, pid.setpoint(), max_dt);

  // The filter covariance is independent of the measurement record, so one
  // deterministic table serves every trajectory.
  std::vector<Diffusion> table;
  table.reserve(lattice.size());
  for (const auto& s : integrate_covariances(init, params, pid.alpha_d(), t_end, lattice))
    table.push_back({s.value.v_yaq, s.value.v_yap, s.value.v_xaya, s.value.v_ya});

  std::vector<std::size_t> grid_node(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j)
    grid_node[j] = static_cast<std::size_t>(
        std::lower_bound(lattice.begin(), lattice.end(), grid[j]) - lattice.begin());

  const std::size_t n_traj = config.trajectories;
  const std::size_t n_grid = grid.size();
  std::vector<double> rec_q(n_traj * n_grid), rec_p(n_traj * n_grid);
  std::vector<char> aborted(n_traj, 0);

  auto run_one = [&](std::size_t k) {
    InnovationStream noise(config.seed, k);
    TrajectoryState s;
    s.pi_q = init.q;
    s.pi_p = init.p;
    s.pi_xa = init.xa;
    s.pi_ya = init.ya;
    std::size_t j = 0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
      s.t = lattice[i];
      while (j < n_grid && grid_node[j] == i) {
        rec_q[k * n_grid + j] = s.pi_q;
        rec_p[k * n_grid + j] = s.pi_p;
        ++j;
      }
      if (i + 1 == lattice.size()) break;
      const double dt = lattice[i + 1] - lattice[i];
      const Diffusion& d = table[i];
      CovarianceState cov;
      cov.v_yaq = d.v_yaq;
      cov.v_yap = d.v_yap;
      cov.v_xaya = d.v_xaya;
      cov.v_ya = d.v_ya;
      s = step_trajectory(s, cov, params, pid, std::sqrt(dt) * noise.next(), dt, config.force);
      if (!std::isfinite(s.pi_q) || !std::isfinite(s.pi_p) || !std::isfinite(s.pi_xa) ||
          !std::isfinite(s.pi_ya) || !std::isfinite(s.err_int)) {
        aborted[k] = 1;
        return;
      }
    }
  };

  unsigned threads = config.threads ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_traj)));
  if (threads == 1) {
    for (std::size_t k = 0; k < n_traj; ++k) run_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t k = next++; k < n_traj; k = next++) run_one(k);
      });
    }
    for (auto& th : pool) th.join();
  }

  EnsembleStats out;
  out.trajectories = n_traj;
  out.seed = config.seed;
  out.aborted = static_cast<std::size_t>(std::count(aborted.begin(), aborted.end(), 1));
  out.used = n_traj - out.aborted;
  if (out.aborted * 1000 > n_traj)
    throw TrajectoryError(lattice.size(), std::to_string(out.aborted) + " of " +
                                              std::to_string(n_traj) + " trajectories aborted");
  if (out.used < 2) throw TrajectoryError(lattice.size(), "fewer than two trajectories finished");

  out.t.assign(grid.begin(), grid.end());
  out.mean_q.resize(n_grid);
  out.var_q.resize(n_grid);
  out.mean_p.resize(n_grid);
  out.var_p.resize(n_grid);
  const double n_used = static_cast<double>(out.used);
  auto reduce = [&](const std::vector<double>& rec, std::size_t j, double& mean, double& var) {
    CompensatedSum sum;
    for (std::size_t k = 0; k < n_traj; ++k)
      if (!aborted[k]) sum.add(rec[k * n_grid + j]);
    mean = sum.value() / n_used;
    CompensatedSum sq;
    for (std::size_t k = 0; k < n_traj; ++k) {
      if (aborted[k]) continue;
      const double d = rec[k * n_grid + j] - mean;
      sq.add(d * d);
    }
    var = sq.value() / (n_used - 1.0);
  };
  for (std::size_t j = 0; j < n_grid; ++j) {
    reduce(rec_q, j, out.mean_q[j], out.var_q[j]);
    reduce(rec_p, j, out.mean_p[j], out.var_p[j]);
  }
  return out;
}

namespace {

double z_score(double diff, double se) {
  if (se > 0.0) return diff / se;
  if (diff == 0.0) return 0.0;
  return std::copysign(std::numeric_limits<double>::infinity(), diff);
}

}  // namespace

EnsembleComparison compare_with_moments(const EnsembleStats& stats,
                                        std::span<const MomentSample> moments) {
  if (moments.size() != stats.t.size())
    throw std::invalid_argument("compare_with_moments: grid size mismatch");
  const double n = static_cast<double>(stats.used);
  EnsembleComparison c;
  for (std::size_t j = 0; j < stats.t.size(); ++j) {
    const MomentSample& m = moments[j];
    if (std::abs(m.t - stats.t[j]) > 1e-9 * std::max(1.0, std::abs(m.t)))
      throw std::invalid_argument("compare_with_moments: grid times differ");
    const double excess = m.mom.excess_q();
    c.t.push_back(stats.t[j]);
    c.ens_mean_q.push_back(stats.mean_q[j]);
    c.ens_var_q.push_back(stats.var_q[j]);
    c.ode_mean_q.push_back(m.mom.m_q);
    c.ode_excess_q.push_back(excess);
    c.cond_vq.push_back(m.cov.v_q);
    c.z_mean.push_back(z_score(stats.mean_q[j] - m.mom.m_q, std::sqrt(stats.var_q[j] / n)));
    c.z_var.push_back(
        z_score(stats.var_q[j] - excess, std::abs(excess) * std::sqrt(2.0 / (n - 1.0))));
  }
  return c;
}

}  // namespace qs
