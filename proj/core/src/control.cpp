#include "quadsqueeze/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "quadsqueeze/errors.hpp"

namespace qs {

namespace {

// a0 = b0 = 0: the factor s cancels and G(s) = b1 / (a2 s + a1).
bool is_first_order(const ClosedLoopTf& tf) { return tf.a0 == 0.0 && tf.b0 == 0.0; }

}  // namespace

std::array<std::complex<double>, 2> ClosedLoopTf::poles() const {
  const double p = a1 / a2;
  const double q = a0 / a2;
  const double disc = p * p - 4.0 * q;
  if (disc >= 0.0) {
    // Stable form avoiding cancellation in -p + sqrt(disc).
    const double root = -0.5 * (p + std::copysign(std::sqrt(disc), p));
    const double other = root != 0.0 ? q / root : 0.0;
    return {std::complex<double>(std::max(root, other), 0.0),
            std::complex<double>(std::min(root, other), 0.0)};
  }
  const double im = 0.5 * std::sqrt(-disc);
  return {std::complex<double>(-0.5 * p, im), std::complex<double>(-0.5 * p, -im)};
}

std::optional<double> ClosedLoopTf::zero() const {
  if (b1 == 0.0) return std::nullopt;
  return -b0 / b1;
}

bool ClosedLoopTf::is_stable() const {
  if (!(a2 > 0.0)) return false;
  if (is_first_order(*this)) return a1 > 0.0;
  return a1 > 0.0 && a0 > 0.0;
}

ClosedLoopTf transfer_function(const SystemParams& params, const PidParams& pid) {
  const double gm = params.gamma();
  ClosedLoopTf tf;
  tf.b1 = pid.mu() * 0.5 * pid.alpha_p() * gm;
  tf.b0 = 0.25 * pid.alpha_i() * gm * gm;
  tf.a2 = 1.0 + pid.alpha_d();
  tf.a1 = 0.5 * (1.0 + pid.alpha_p()) * gm;
  tf.a0 = 0.25 * pid.alpha_i() * gm * gm;
  return tf;
}

double final_value(const ClosedLoopTf& tf) {
  if (!tf.is_stable()) throw UnstableLoopError("closed loop is not asymptotically stable");
  if (is_first_order(tf)) return tf.b1 / tf.a1;
  return tf.b0 / tf.a0;
}

StepSpecs::StepSpecs(double overshoot, double settling_time)
    : overshoot_(overshoot), settling_time_(settling_time) {
  if (!(overshoot > 0.0 && overshoot < 1.0))
    throw std::invalid_argument("overshoot fraction must lie in (0, 1)");
  if (!(settling_time > 0.0 && std::isfinite(settling_time)))
    throw std::invalid_argument("settling time must be finite and > 0");
}

TunedPid tune_pid(const StepSpecs& specs, double gamma, double alpha_d) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be > 0");
  require_valid_derivative_gain(alpha_d);
  const double log_r = std::log(specs.overshoot());
  const double zeta = -log_r / std::sqrt(std::numbers::pi * std::numbers::pi + log_r * log_r);
  const double wn = 4.0 / (zeta * specs.settling_time());
  const double scale = 1.0 + alpha_d;
  const double alpha_p = 4.0 * scale * zeta * wn / gamma - 1.0;
  const double alpha_i = 4.0 * scale * wn * wn / (gamma * gamma);
  if (alpha_p < 0.0)
    throw UnreachableSpecError("settling time needs alpha_p = " + std::to_string(alpha_p) +
                               " < 0; the passive damping alone is already faster");
  return {PidParams(alpha_p, alpha_i, alpha_d, 0.0), zeta, wn};
}

double step_response_at(const ClosedLoopTf& tf, double t) {
  if (t <= 0.0) return 0.0;
  if (is_first_order(tf)) {
    if (tf.a1 == 0.0) return tf.b1 * t / tf.a2;
    return tf.b1 / tf.a1 * (1.0 - std::exp(-tf.a1 * t / tf.a2));
  }
  // y'' + p y' + q y = c1 r' + c0 r with y(0+) = 0, y'(0+) = c1.
  const double p = tf.a1 / tf.a2;
  const double q = tf.a0 / tf.a2;
  const double c1 = tf.b1 / tf.a2;
  const double c0 = tf.b0 / tf.a2;
  const double y_inf = c0 / q;
  const double w0 = -y_inf;
  const double dw0 = c1;
  const double disc = p * p - 4.0 * q;
  const double tiny = 1e-12 * std::max(p * p, std::abs(q));
  if (disc > tiny) {
    const double s = std::sqrt(disc);
    const double l1 = 0.5 * (-p + s);
    const double l2 = 0.5 * (-p - s);
    const double a = (dw0 - l2 * w0) / (l1 - l2);
    const double b = w0 - a;
    return y_inf + a * std::exp(l1 * t) + b * std::exp(l2 * t);
  }
  if (disc < -tiny) {
    const double sr = -0.5 * p;
    const double w = 0.5 * std::sqrt(-disc);
    return y_inf + std::exp(sr * t) * (w0 * std::cos(w * t) + (dw0 - sr * w0) / w * std::sin(w * t));
  }
  const double l = -0.5 * p;
  return y_inf + std::exp(l * t) * (w0 + (dw0 - l * w0) * t);
}

ResponseMetrics response_metrics(std::span<const double> t, std::span<const double> y,
                                 double final_value, double band) {
  if (t.size() != y.size()) throw std::invalid_argument("response_metrics: size mismatch");
  ResponseMetrics m;
  m.final_value = final_value;
  if (final_value == 0.0 || t.empty()) return m;
  double peak = -std::numeric_limits<double>::infinity();
  for (double v : y) peak = std::max(peak, v / final_value);
  m.overshoot = std::max(0.0, peak - 1.0);

  std::size_t last_out = t.size();
  for (std::size_t i = t.size(); i-- > 0;) {
    if (std::abs(y[i] / final_value - 1.0) > band) {
      last_out = i;
      break;
    }
  }
  if (last_out == t.size()) {
    m.settling_time = t.front();
  } else if (last_out + 1 == t.size()) {
    m.settling_time = t.back();
  } else {
    // Linear interpolation of the band crossing between the last outside
    // sample and the first inside one.
    const std::size_t i = last_out;
    const double e0 = std::abs(y[i] / final_value - 1.0) - band;
    const double e1 = std::abs(y[i + 1] / final_value - 1.0) - band;
    const double frac = e0 / (e0 - e1);
    m.settling_time = t[i] + frac * (t[i + 1] - t[i]);
  }
  return m;
}

StepResponse step_response(const ClosedLoopTf& tf, std::span<const double> grid) {
  StepResponse out;
  out.t.assign(grid.begin(), grid.end());
  out.y.reserve(grid.size());
  for (double t : grid) out.y.push_back(step_response_at(tf, t));

  const double y_inf = final_value(tf);
  double slowest = std::numeric_limits<double>::infinity();
  if (is_first_order(tf)) {
    slowest = tf.a1 / tf.a2;
  } else {
    for (const auto& pole : tf.poles()) slowest = std::min(slowest, std::abs(pole.real()));
  }
  const double horizon = std::max(grid.empty() ? 0.0 : grid.back(), 20.0 / slowest);
  constexpr std::size_t kDense = 200'001;
  std::vector<double> dt(kDense), dy(kDense);
  for (std::size_t i = 0; i < kDense; ++i) {
    dt[i] = horizon * static_cast<double>(i) / static_cast<double>(kDense - 1);
    dy[i] = step_response_at(tf, dt[i]);
  }
  out.metrics = response_metrics(dt, dy, y_inf);
  return out;
}

}  // namespace qs
