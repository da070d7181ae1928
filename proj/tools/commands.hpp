#pragma once

#include <ostream>

#include "scenario.hpp"

namespace qs::cli {

/// Writes "# quadsqueeze <command> key=value ..." recording the resolved config.
void write_config_comment(std::ostream& os, const char* command, const ScenarioConfig& cfg);

/// t, cond_vq, cond_vp, excess_q, uncond_vq, uncond_vp
void cmd_variances(const ScenarioConfig& cfg, std::ostream& csv);

/// t, setpoint, mean_q; summary reports overshoot, settling time and steady error.
void cmd_track(const ScenarioConfig& cfg, std::ostream& csv, std::ostream& summary);

struct TuneRequest {
  double overshoot = 0.05;
  double settling = 2.0;  // in `units`
  double gamma = 1e-5;
  double alpha_d = 0.0;
  TimeUnits units = TimeUnits::inverse_gamma;
};

void cmd_tune(const TuneRequest& req, std::ostream& out);

/// Monte-Carlo statistics of pi(Q) against the moment equations.
void cmd_ensemble(const ScenarioConfig& cfg, unsigned threads, std::ostream& csv,
                  std::ostream& summary);

void cmd_force(const ScenarioConfig& cfg, std::ostream& summary);

}  // namespace qs::cli
