#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "quadsqueeze/errors.hpp"
#include "scenario.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trajectories;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config, "Scenario file (key = value lines)")->check(CLI::ExistingFile);
  sub->add_option("-o,--out", o.out, "Write CSV here instead of stdout");
}

qs::cli::ScenarioConfig resolve(const CommonOptions& o) {
  qs::cli::ScenarioConfig cfg = o.config.empty() ? qs::cli::ScenarioConfig{} : qs::cli::load_config(o.config);
  if (!o.out.empty()) cfg.out = o.out;
  if (o.seed) cfg.seed = *o.seed;
  if (o.trajectories) cfg.trajectories = *o.trajectories;
  qs::cli::validate(cfg);
  return cfg;
}

unsigned thread_cap() {
  const char* env = std::getenv("QS_THREADS");
  if (!env || !*env) return 0;
  try {
    const long v = std::stol(env);
    return v > 0 ? static_cast<unsigned>(v) : 0;
  } catch (const std::exception&) {
    throw qs::cli::ConfigError("QS_THREADS must be a positive integer");
  }
}

// CSV goes to the configured file or stdout; the human summary then goes to
// stdout or stderr respectively so the two never interleave.
template <class Fn>
void with_output(const qs::cli::ScenarioConfig& cfg, Fn&& fn) {
  if (cfg.out.empty()) {
    fn(std::cout, std::cerr);
    return;
  }
  std::ofstream f(cfg.out, std::ios::binary);
  if (!f) throw qs::cli::ConfigError("cannot open " + cfg.out + " for writing");
  fn(static_cast<std::ostream&>(f), std::cout);
  f.flush();
  if (!f) throw qs::cli::ConfigError("write to " + cfg.out + " failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feedback-controlled quadrature squeezing of a measured mechanical oscillator"};
  app.require_subcommand(1);

  CommonOptions var_opts, track_opts, ens_opts, force_opts;
  auto* variances = app.add_subcommand("variances", "Conditional and unconditional variances over time");
  add_common(variances, var_opts);
  auto* track = app.add_subcommand("track", "Mean Q response to the setpoint");
  add_common(track, track_opts);
  auto* ensemble = app.add_subcommand("ensemble", "Monte-Carlo trajectories against the moment equations");
  add_common(ensemble, ens_opts);
  ensemble->add_option("--seed", ens_opts.seed, "Override the scenario seed");
  ensemble->add_option("--trajectories", ens_opts.trajectories, "Override the trajectory count")
      ->check(CLI::PositiveNumber);
  auto* force = app.add_subcommand("force", "Force detectability report");
  force->add_option("-c,--config", force_opts.config, "Scenario file")->check(CLI::ExistingFile);

  qs::cli::TuneRequest tune_req;
  std::string units = "inverse_gamma";
  auto* tune = app.add_subcommand("tune", "PID gains for a target overshoot and settling time");
  tune->add_option("--overshoot", tune_req.overshoot, "Fractional overshoot, in (0, 1)")->required();
  tune->add_option("--settling", tune_req.settling, "2 % settling time")->required();
  tune->add_option("--gamma", tune_req.gamma, "Mechanical damping rate")->capture_default_str();
  tune->add_option("--alpha-d", tune_req.alpha_d, "Derivative gain")->capture_default_str();
  tune->add_option("--units", units, "Settling-time units")
      ->check(CLI::IsMember({"absolute", "inverse_gamma"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*variances) {
      const auto cfg = resolve(var_opts);
      with_output(cfg, [&](std::ostream& csv, std::ostream&) { qs::cli::cmd_variances(cfg, csv); });
    } else if (*track) {
      const auto cfg = resolve(track_opts);
      with_output(cfg, [&](std::ostream& csv, std::ostream& summary) {
        qs::cli::cmd_track(cfg, csv, summary);
      });
    } else if (*ensemble) {
      const auto cfg = resolve(ens_opts);
      const unsigned threads = thread_cap();
      with_output(cfg, [&](std::ostream& csv, std::ostream& summary) {
        qs::cli::cmd_ensemble(cfg, threads, csv, summary);
      });
    } else if (*force) {
      const auto cfg = resolve(force_opts);
      qs::cli::cmd_force(cfg, std::cout);
    } else if (*tune) {
      tune_req.units = units == "absolute" ? qs::cli::TimeUnits::absolute : qs::cli::TimeUnits::inverse_gamma;
      qs::cli::cmd_tune(tune_req, std::cout);
    }
  } catch (const qs::IntegrationError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const qs::ConvergenceError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const qs::TrajectoryError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const qs::UnstableLoopError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const qs::UnreachableSpecError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
