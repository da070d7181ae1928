#pragma once

// Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.
// Header-only; the state is a fixed-size std::array so the covariance and
// moment systems stay allocation-free inside the step loop.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>

#include "quadsqueeze/errors.hpp"

namespace qs {

struct OdeOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double max_step = std::numeric_limits<double>::infinity();
  /// 0 selects an automatic first step.
  double initial_step = 0.0;
  std::size_t max_steps = 100'000'000;
};

struct OdeStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

template <std::size_t N>
class DormandPrince45 {
 public:
  using State = std::array<double, N>;

  /// Integrates y' = rhs(t, y) from (t0, y0) to t1 and calls
  /// observe(t, y) at every time in `outputs` (sorted, inside [t0, t1]).
  /// `rhs` has the signature void(double t, const State& y, State& dydt).
  /// Throws IntegrationError on non-finite states or step-size underflow.
  template <class Rhs, class Observer>
  static State integrate(Rhs&& rhs, double t0, const State& y0, double t1,
                         std::span<const double> outputs, Observer&& observe,
                         const OdeOptions& opts = {}, OdeStats* stats = nullptr) {
    if (!(t1 >= t0)) throw std::invalid_argument("integrate: t1 must not precede t0");
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (outputs[i] < t0 || outputs[i] > t1 || (i > 0 && outputs[i] < outputs[i - 1]))
        throw std::invalid_argument("integrate: output times must be sorted and inside [t0, t1]");
    }

    std::size_t next_out = 0;
    while (next_out < outputs.size() && outputs[next_out] == t0) {
      observe(t0, y0);
      ++next_out;
    }
    if (t1 == t0) return y0;

    State y = y0;
    State f;
    rhs(t0, y, f);
    require_finite(f, t0, "non-finite derivative");

    double t = t0;
    double h = opts.initial_step > 0.0 ? opts.initial_step : initial_step(rhs, t0, y, f, opts);
    h = std::min({h, opts.max_step, t1 - t0});

    State k2, k3, k4, k5, k6, k7, tmp, y_new;
    std::size_t steps = 0;
    OdeStats local;

    while (t < t1) {
      if (++steps > opts.max_steps) throw IntegrationError(t, "step budget exhausted");
      bool last = false;
      if (t + h >= t1 || t1 - (t + h) < 1e-14 * std::max(1.0, std::abs(t1))) {
        h = t1 - t;
        last = true;
      }

      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a21 * f[i]);
      rhs(t + c2 * h, tmp, k2);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * f[i] + a32 * k2[i]);
      rhs(t + c3 * h, tmp, k3);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a41 * f[i] + a42 * k2[i] + a43 * k3[i]);
      rhs(t + c4 * h, tmp, k4);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a51 * f[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
      rhs(t + c5 * h, tmp, k5);
      for (std::size_t i = 0; i < N; ++i)
        tmp[i] = y[i] + h * (a61 * f[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
      rhs(t + h, tmp, k6);
      for (std::size_t i = 0; i < N; ++i)
        y_new[i] = y[i] + h * (b1 * f[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
      const double t_new = last ? t1 : t + h;
      rhs(t_new, y_new, k7);

      double err = 0.0;
      bool finite = true;
      for (std::size_t i = 0; i < N; ++i) {
        const double e = h * (e1 * f[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                              e7 * k7[i]);
        const double scale =
            opts.abs_tol + opts.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        const double r = e / scale;
        err += r * r;
        if (!std::isfinite(y_new[i]) || !std::isfinite(k7[i])) finite = false;
      }
      err = finite ? std::sqrt(err / static_cast<double>(N)) : std::numeric_limits<double>::infinity();

      if (err <= 1.0) {
        ++local.accepted;
        while (next_out < outputs.size() && outputs[next_out] <= t_new) {
          const double tau = outputs[next_out];
          if (tau == t_new) {
            observe(tau, y_new);
          } else {
            observe(tau, hermite(t, y, f, t_new, y_new, k7, tau));
          }
          ++next_out;
        }
        t = t_new;
        y = y_new;
        f = k7;
        if (last) break;
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h = std::min(h * factor, opts.max_step);
      } else {
        ++local.rejected;
        const double factor = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9) : 0.1;
        h *= factor;
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) {
          if (!finite) throw IntegrationError(t, "non-finite state");
          throw IntegrationError(t, "step size underflow");
        }
      }
    }
    if (stats) *stats = local;
    return y;
  }

  /// Third-order Hermite interpolant between two accepted step endpoints.
  static State hermite(double t0, const State& y0, const State& f0, double t1, const State& y1,
                       const State& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    State out;
    for (std::size_t i = 0; i < N; ++i)
      out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
  }

 private:
  static void require_finite(const State& v, double t, const char* what) {
    for (double x : v)
      if (!std::isfinite(x)) throw IntegrationError(t, what);
  }

  template <class Rhs>
  static double initial_step(Rhs& rhs, double t0, const State& y0, const State& f0,
                             const OdeOptions& opts) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y0[i]);
      d0 += (y0[i] / sc) * (y0[i] / sc);
      d1 += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;

    State y1, f1;
    for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
    rhs(t0 + h0, y1, f1);
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opts.abs_tol + opts.rel_tol * std::abs(y0[i]);
      d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    d2 = std::sqrt(d2 / N) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    const double h = std::min(100.0 * h0, h1);
    return std::isfinite(h) && h > 0.0 ? h : 1e-6;
  }

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace qs
