#include "scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace qs::cli {

namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end || !std::isfinite(x))
    throw ConfigError("expected a finite number, got '" + v + "'");
  return x;
}

std::uint64_t to_uint(const std::string& v) {
  std::uint64_t x = 0;
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected a non-negative integer, got '" + v + "'");
  return x;
}

std::vector<SetpointSignal::Segment> to_segments(const std::string& v) {
  std::vector<SetpointSignal::Segment> segs;
  if (v.find(':') == std::string::npos) {
    segs.push_back({0.0, to_double(trim(v))});
    return segs;
  }
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    const auto colon = item.find(':');
    if (colon == std::string::npos)
      throw ConfigError("setpoint segments are 'start:value' pairs, got '" + item + "'");
    segs.push_back({to_double(trim(item.substr(0, colon))), to_double(trim(item.substr(colon + 1)))});
  }
  return segs;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

using Setter = std::function<void(ScenarioConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto num = [&t](const char* key, double ScenarioConfig::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& v) { c.*field = to_double(v); };
    };
    num("kappa", &ScenarioConfig::kappa);
    num("gamma", &ScenarioConfig::gamma);
    num("g", &ScenarioConfig::g);
    num("n_th", &ScenarioConfig::n_th);
    num("alpha_p", &ScenarioConfig::alpha_p);
    num("alpha_i", &ScenarioConfig::alpha_i);
    num("alpha_d", &ScenarioConfig::alpha_d);
    num("mu", &ScenarioConfig::mu);
    num("init_q", &ScenarioConfig::init_q);
    num("init_p", &ScenarioConfig::init_p);
    num("init_xa", &ScenarioConfig::init_xa);
    num("init_ya", &ScenarioConfig::init_ya);
    num("force_f1", &ScenarioConfig::force_f1);
    num("force_f2", &ScenarioConfig::force_f2);
    num("t_end", &ScenarioConfig::t_end);
    num("dt", &ScenarioConfig::dt);

    auto cov = [&t](const char* key, double CovarianceState::*field) {
      t[key] = [field](ScenarioConfig& c, const std::string& v) { c.custom_cov.*field = to_double(v); };
    };
    cov("cov_q", &CovarianceState::v_q);
    cov("cov_qp", &CovarianceState::v_qp);
    cov("cov_p", &CovarianceState::v_p);
    cov("cov_xa", &CovarianceState::v_xa);
    cov("cov_xaya", &CovarianceState::v_xaya);
    cov("cov_ya", &CovarianceState::v_ya);
    cov("cov_xaq", &CovarianceState::v_xaq);
    cov("cov_xap", &CovarianceState::v_xap);
    cov("cov_yaq", &CovarianceState::v_yaq);
    cov("cov_yap", &CovarianceState::v_yap);

    t["setpoint"] = [](ScenarioConfig& c, const std::string& v) { c.setpoint = to_segments(v); };
    t["init"] = [](ScenarioConfig& c, const std::string& v) {
      if (v == "ground") c.init = CovariancePreset::ground;
      else if (v == "thermal") c.init = CovariancePreset::thermal;
      else if (v == "custom") c.init = CovariancePreset::custom;
      else throw ConfigError("init must be ground, thermal or custom, got '" + v + "'");
    };
    t["units"] = [](ScenarioConfig& c, const std::string& v) {
      if (v == "absolute") c.units = TimeUnits::absolute;
      else if (v == "inverse_gamma") c.units = TimeUnits::inverse_gamma;
      else throw ConfigError("units must be absolute or inverse_gamma, got '" + v + "'");
    };
    t["grid_points"] = [](ScenarioConfig& c, const std::string& v) { c.grid_points = to_uint(v); };
    t["trajectories"] = [](ScenarioConfig& c, const std::string& v) { c.trajectories = to_uint(v); };
    t["seed"] = [](ScenarioConfig& c, const std::string& v) { c.seed = to_uint(v); };
    t["out"] = [](ScenarioConfig& c, const std::string& v) { c.out = v; };
    return t;
  }();
  return table;
}

class Loader {
 public:
  explicit Loader(std::string source) : source_(std::move(source)) {}

  void apply(const std::string& key, const std::string& value, std::size_t line) {
    const auto it = setters().find(key);
    if (it == setters().end()) fail(line, "unknown key '" + key + "'");
    if (!seen_.insert(key).second) fail(line, "duplicate key '" + key + "'");
    if (key.rfind("cov_", 0) == 0) custom_keys_ = true;
    try {
      it->second(cfg_, value);
    } catch (const ConfigError& e) {
      fail(line, key + ": " + e.what());
    }
  }

  ScenarioConfig finish() {
    if (custom_keys_ && cfg_.init != CovariancePreset::custom)
      throw ConfigError(source_ + ": cov_* keys require init = custom");
    try {
      validate(cfg_);
    } catch (const ConfigError& e) {
      throw ConfigError(source_ + ": " + e.what());
    }
    return cfg_;
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw ConfigError(source_ + (line ? ":" + std::to_string(line) : std::string()) + ": " + what);
  }

 private:
  std::string source_;
  ScenarioConfig cfg_;
  std::set<std::string> seen_;
  bool custom_keys_ = false;
};

}  // namespace

double ScenarioConfig::time_scale() const {
  return units == TimeUnits::inverse_gamma ? 1.0 / gamma : 1.0;
}

SystemParams ScenarioConfig::system() const { return SystemParams(kappa, gamma, g, n_th); }

PidParams ScenarioConfig::pid() const {
  std::vector<SetpointSignal::Segment> segs = setpoint;
  for (auto& s : segs) s.start *= time_scale();
  return PidParams(alpha_p, alpha_i, alpha_d, mu, SetpointSignal(std::move(segs)));
}

InitialState ScenarioConfig::initial() const {
  InitialState s;
  switch (init) {
    case CovariancePreset::ground: s = InitialState::ground(); break;
    case CovariancePreset::thermal: s = InitialState::thermal(n_th); break;
    case CovariancePreset::custom: s = InitialState::custom(custom_cov); break;
  }
  return s.with_means(init_q, init_p, init_xa, init_ya);
}

ExternalForce ScenarioConfig::force() const { return {force_f1, force_f2}; }

double ScenarioConfig::t_end_abs() const { return t_end * time_scale(); }

std::vector<double> ScenarioConfig::grid_abs() const { return uniform_grid(t_end_abs(), grid_points); }

void validate(const ScenarioConfig& cfg) {
  try {
    (void)cfg.system();
    (void)cfg.pid();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(cfg.t_end > 0.0)) throw ConfigError("t_end must be > 0");
  if (cfg.grid_points < 2) throw ConfigError("grid_points must be >= 2");
  if (cfg.trajectories < 2) throw ConfigError("trajectories must be >= 2");
  if (cfg.dt < 0.0) throw ConfigError("dt must be >= 0 (0 selects 0.01/kappa)");
  if (cfg.init == CovariancePreset::custom) {
    const CovarianceState& v = cfg.custom_cov;
    if (v.v_q < 0.0 || v.v_p < 0.0 || v.v_xa < 0.0 || v.v_ya < 0.0)
      throw ConfigError("custom covariance diagonal entries must be >= 0");
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& source) {
  Loader loader(source);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) loader.fail(line_no, "expected 'key = value'");
    loader.apply(trim(line.substr(0, eq)), unquote(trim(line.substr(eq + 1))), line_no);
  }
  return loader.finish();
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::string to_line(const ScenarioConfig& c) {
  std::ostringstream os;
  auto kv = [&os](const char* k, const std::string& v) { os << (os.tellp() > 0 ? " " : "") << k << '=' << v; };
  kv("kappa", fmt(c.kappa));
  kv("gamma", fmt(c.gamma));
  kv("g", fmt(c.g));
  kv("n_th", fmt(c.n_th));
  kv("alpha_p", fmt(c.alpha_p));
  kv("alpha_i", fmt(c.alpha_i));
  kv("alpha_d", fmt(c.alpha_d));
  kv("mu", fmt(c.mu));
  std::string sp;
  for (const auto& s : c.setpoint) sp += (sp.empty() ? "" : ",") + fmt(s.start) + ":" + fmt(s.value);
  kv("setpoint", sp);
  kv("init", c.init == CovariancePreset::ground    ? "ground"
             : c.init == CovariancePreset::thermal ? "thermal"
                                                   : "custom");
  kv("init_q", fmt(c.init_q));
  kv("init_p", fmt(c.init_p));
  kv("init_xa", fmt(c.init_xa));
  kv("init_ya", fmt(c.init_ya));
  if (c.init == CovariancePreset::custom) {
    const CovarianceState& v = c.custom_cov;
    kv("cov_q", fmt(v.v_q));
    kv("cov_qp", fmt(v.v_qp));
    kv("cov_p", fmt(v.v_p));
    kv("cov_xa", fmt(v.v_xa));
    kv("cov_xaya", fmt(v.v_xaya));
    kv("cov_ya", fmt(v.v_ya));
    kv("cov_xaq", fmt(v.v_xaq));
    kv("cov_xap", fmt(v.v_xap));
    kv("cov_yaq", fmt(v.v_yaq));
    kv("cov_yap", fmt(v.v_yap));
  }
  kv("force_f1", fmt(c.force_f1));
  kv("force_f2", fmt(c.force_f2));
  kv("units", c.units == TimeUnits::absolute ? "absolute" : "inverse_gamma");
  kv("t_end", fmt(c.t_end));
  kv("grid_points", std::to_string(c.grid_points));
  kv("trajectories", std::to_string(c.trajectories));
  kv("seed", std::to_string(c.seed));
  kv("dt", fmt(c.dt));
  if (!c.out.empty()) kv("out", c.out);
  return os.str();
}

ScenarioConfig parse_config_line(const std::string& line) {
  Loader loader("<config line>");
  std::istringstream is(line);
  std::string token;
  while (is >> token) {
    if (token == "#") continue;
    const auto eq = token.find('=');
    if (eq == std::string::npos) loader.fail(0, "expected key=value, got '" + token + "'");
    loader.apply(token.substr(0, eq), token.substr(eq + 1), 0);
  }
  return loader.finish();
}

}  // namespace qs::cli
