#pragma once

// Scenario configuration for the command-line runner: a flat key = value
// file, '#' comments, one key per line. Unknown or repeated keys are errors.

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadsqueeze/covariance_state.hpp"
#include "quadsqueeze/model.hpp"
#include "quadsqueeze/moments.hpp"
#include "quadsqueeze/setpoint.hpp"

namespace qs::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TimeUnits { absolute, inverse_gamma };
enum class CovariancePreset { ground, thermal, custom };

struct ScenarioConfig {
  // System, omega_m = 1.
  double kappa = 0.1;
  double gamma = 1e-5;
  double g = 1.5e-3;
  double n_th = 0.0;

  // Feedback.
  double alpha_p = 0.0;
  double alpha_i = 0.0;
  double alpha_d = 0.0;
  double mu = 1.0;
  /// Start times in `units`.
  std::vector<SetpointSignal::Segment> setpoint{{0.0, 0.0}};

  // Initial filter state.
  CovariancePreset init = CovariancePreset::ground;
  double init_q = 0.0;
  double init_p = 0.0;
  double init_xa = 0.0;
  double init_ya = 0.0;
  CovarianceState custom_cov;

  double force_f1 = 0.0;
  double force_f2 = 0.0;

  // Horizon and sampling; t_end, dt and setpoint times are in `units`.
  TimeUnits units = TimeUnits::inverse_gamma;
  double t_end = 10.0;
  std::size_t grid_points = 201;

  // Monte Carlo.
  std::size_t trajectories = 2000;
  std::uint64_t seed = 1;
  double dt = 0.0;  // 0 -> 0.01 / kappa

  std::string out;

  /// Absolute time per configured time unit.
  double time_scale() const;

  SystemParams system() const;
  PidParams pid() const;
  InitialState initial() const;
  ExternalForce force() const;
  double t_end_abs() const;
  std::vector<double> grid_abs() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses key = value lines. `source` prefixes error messages.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

/// Single-line "key=value key=value ..." rendering of every key, with
/// values printed to round-trip exactly.
std::string to_line(const ScenarioConfig& cfg);
ScenarioConfig parse_config_line(const std::string& line);

/// Throws ConfigError when the combination of values is invalid.
void validate(const ScenarioConfig& cfg);

}  // namespace qs::cli
