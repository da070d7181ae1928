#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "quadsqueeze/control.hpp"
#include "quadsqueeze/force.hpp"
#include "quadsqueeze/moments.hpp"
#include "quadsqueeze/trajectory.hpp"

namespace qs::cli {

namespace {

// Decimal, 12 significant digits.
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void row(std::ostream& os, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) os << ',';
    os << num(v);
    first = false;
  }
  os << '\n';
}

}  // namespace

void write_config_comment(std::ostream& os, const char* command, const ScenarioConfig& cfg) {
  os << "# quadsqueeze " << command << ' ' << to_line(cfg) << '\n';
}

void cmd_variances(const ScenarioConfig& cfg, std::ostream& csv) {
  const auto grid = cfg.grid_abs();
  const auto run = run_moments(cfg.initial(), cfg.system(), cfg.pid(), cfg.force(), cfg.t_end_abs(), grid);
  write_config_comment(csv, "variances", cfg);
  csv << "t,cond_vq,cond_vp,excess_q,uncond_vq,uncond_vp\n";
  const double scale = cfg.time_scale();
  for (const auto& s : run) {
    const VariancePair v = unconditional_variance(s.cov, s.mom);
    row(csv, {s.t / scale, s.cov.v_q, s.cov.v_p, s.mom.excess_q(), v.q, v.p});
  }
}

void cmd_track(const ScenarioConfig& cfg, std::ostream& csv, std::ostream& summary) {
  const auto grid = cfg.grid_abs();
  const PidParams pid = cfg.pid();
  const auto run = run_moments(cfg.initial(), cfg.system(), pid, cfg.force(), cfg.t_end_abs(), grid);
  write_config_comment(csv, "track", cfg);
  csv << "t,setpoint,mean_q\n";
  const double scale = cfg.time_scale();
  // Metrics cover the response to the last setpoint change before t_end.
  double t_step = 0.0;
  for (double b : pid.setpoint().breakpoints())
    if (b < cfg.t_end_abs()) t_step = b;
  std::vector<double> t, y;
  double y_step = 0.0;
  for (const auto& s : run) {
    row(csv, {s.t / scale, pid.setpoint().value(s.t), s.mom.m_q});
    if (s.t < t_step) continue;
    if (t.empty()) y_step = s.mom.m_q;
    t.push_back((s.t - t_step) / scale);
    y.push_back(s.mom.m_q - y_step);
  }
  const double r_end = pid.setpoint().value(cfg.t_end_abs());
  const double y_end = run.back().mom.m_q;
  summary << "final_setpoint = " << num(r_end) << '\n'
          << "final_mean_q = " << num(y_end) << '\n'
          << "steady_error = " << num(r_end - y_end) << '\n';
  if (t.size() >= 2 && y.back() != 0.0) {
    const ResponseMetrics m = response_metrics(t, y, y.back());
    summary << "step_time = " << num(t_step / scale) << '\n'
            << "overshoot = " << num(m.overshoot) << '\n'
            << "settling_time = " << num(m.settling_time) << '\n';
  }
}

void cmd_tune(const TuneRequest& req, std::ostream& out) {
  const double scale = req.units == TimeUnits::inverse_gamma ? 1.0 / req.gamma : 1.0;
  const TunedPid tuned = tune_pid(StepSpecs(req.overshoot, req.settling * scale), req.gamma, req.alpha_d);
  out << "alpha_p = " << num(tuned.pid.alpha_p()) << '\n'
      << "alpha_i = " << num(tuned.pid.alpha_i()) << '\n'
      << "alpha_d = " << num(tuned.pid.alpha_d()) << '\n'
      << "mu = " << num(tuned.pid.mu()) << '\n'
      << "damping_ratio = " << num(tuned.damping_ratio) << '\n'
      << "natural_frequency = " << num(tuned.natural_frequency) << '\n'
      << "natural_frequency_over_gamma = " << num(tuned.natural_frequency / req.gamma) << '\n';
}

void cmd_ensemble(const ScenarioConfig& cfg, unsigned threads, std::ostream& csv,
                  std::ostream& summary) {
  const auto grid = cfg.grid_abs();
  const PidParams pid = cfg.pid();
  EnsembleConfig ec;
  ec.trajectories = cfg.trajectories;
  ec.seed = cfg.seed;
  ec.max_dt = cfg.dt * cfg.time_scale();
  ec.threads = threads;
  ec.force = cfg.force();
  const EnsembleStats stats = run_ensemble(cfg.initial(), cfg.system(), pid, cfg.t_end_abs(), grid, ec);
  const auto moments = run_moments(cfg.initial(), cfg.system(), pid, cfg.force(), cfg.t_end_abs(), grid);
  const EnsembleComparison c = compare_with_moments(stats, moments);

  write_config_comment(csv, "ensemble", cfg);
  csv << "t,ens_mean_q,ens_var_q,ode_mean_q,ode_excess_q,cond_vq,ens_uncond_vq,ode_uncond_vq,"
         "z_mean,z_var\n";
  const double scale = cfg.time_scale();
  double max_z_mean = 0.0, max_z_var = 0.0;
  for (std::size_t j = 0; j < c.t.size(); ++j) {
    row(csv, {c.t[j] / scale, c.ens_mean_q[j], c.ens_var_q[j], c.ode_mean_q[j], c.ode_excess_q[j],
              c.cond_vq[j], c.cond_vq[j] + c.ens_var_q[j], c.cond_vq[j] + c.ode_excess_q[j],
              c.z_mean[j], c.z_var[j]});
    max_z_mean = std::max(max_z_mean, std::abs(c.z_mean[j]));
    max_z_var = std::max(max_z_var, std::abs(c.z_var[j]));
  }
  summary << "trajectories = " << stats.trajectories << '\n'
          << "used = " << stats.used << '\n'
          << "aborted = " << stats.aborted << '\n'
          << "seed = " << stats.seed << '\n'
          << "max_abs_z_mean = " << num(max_z_mean) << '\n'
          << "max_abs_z_var = " << num(max_z_var) << '\n';
}

void cmd_force(const ScenarioConfig& cfg, std::ostream& summary) {
  const DetectabilityReport r = detectability(cfg.force(), cfg.system(), cfg.pid(), cfg.t_end_abs());
  write_config_comment(summary, "force", cfg);
  summary << "open_loop_q = " << num(r.open_loop.q) << '\n'
          << "open_loop_p = " << num(r.open_loop.p) << '\n'
          << "closed_loop_q = " << num(r.closed_loop.q) << '\n'
          << "closed_loop_p = " << num(r.closed_loop.p) << '\n'
          << "uncond_vq = " << num(r.vq) << '\n'
          << "ratio = " << num(r.ratio) << '\n'
          << "closed_loop_ratio = " << num(r.closed_loop_ratio) << '\n';
}

}  // namespace qs::cli
