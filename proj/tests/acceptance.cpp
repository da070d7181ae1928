// Acceptance suite: one PASS/FAIL line per criterion, indented detail lines
// beneath. Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "quadsqueeze/control.hpp"
#include "quadsqueeze/covariance.hpp"
#include "quadsqueeze/force.hpp"
#include "quadsqueeze/moments.hpp"
#include "quadsqueeze/trajectory.hpp"

using namespace qs;

namespace {

const double kKappa = 0.1;
const double kGamma = 1e-5;
const double kG = 1.5e-3;
const double kDeskGamma = 1e-3;

SystemParams nominal() { return SystemParams(kKappa, kGamma, kG); }

SystemParams with_nba(double n_ba, double n_th, double gamma) {
  return SystemParams(kKappa, gamma, SystemParams::coupling_for_back_action(n_ba, kKappa, gamma), n_th);
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

struct Outcome {
  bool ok = true;
  std::string summary;
  std::vector<std::string> details;

  void check(bool cond, const std::string& what) {
    if (!cond) ok = false;
    details.push_back(std::string(cond ? "ok   " : "MISS ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome criterion_1() {
  Outcome o;
  const double n = back_action_number(nominal());
  o.check(std::abs(n - 4.5) <= 4 * std::numeric_limits<double>::epsilon() * 4.5, fmt("n_BA = %.17g", n));
  o.summary = fmt("back-action number %.12g", n);
  return o;
}

Outcome criterion_2() {
  Outcome o;
  const double t_end = 10.0 / kGamma;
  const std::vector<double> grid{t_end};
  const auto cov = integrate_covariances(InitialState::ground(), nominal(), 0.0, t_end, grid);
  const auto mom = run_moments(InitialState::ground(), nominal(), PidParams(), {}, t_end, grid);
  const double cond = cov[0].value.v_p;
  const double uncond = unconditional_variance(mom[0].cov, mom[0].mom).p;
  o.check(rel_err(cond, 5.0) <= 0.05, fmt("conditional V_P(10/gamma) = %.6f", cond));
  o.check(rel_err(uncond, 5.0) <= 0.05, fmt("unconditional V_P(10/gamma) = %.6f", uncond));
  o.summary = fmt("stationary P variance %.4f / %.4f", cond, uncond);
  return o;
}

Outcome criterion_3() {
  Outcome o;
  const TunedPid t = tune_pid(StepSpecs(0.05, 2.0 / kGamma), kGamma);
  o.check(std::abs(t.pid.alpha_p() - 7.0) <= 0.05, fmt("alpha_p = %.6f", t.pid.alpha_p()));
  o.check(std::abs(t.pid.alpha_i() - 33.6) <= 0.2, fmt("alpha_i = %.6f", t.pid.alpha_i()));
  o.check(t.pid.alpha_d() == 0.0, fmt("alpha_d = %g", t.pid.alpha_d()));
  o.summary = fmt("tuned gains alpha_p = %.4f, alpha_i = %.4f", t.pid.alpha_p(), t.pid.alpha_i());
  return o;
}

Outcome criterion_4() {
  Outcome o;
  const PidParams pid(10, 0, 0, 1.0, SetpointSignal::step(1.0));
  const double target = 10.0 / 11.0;
  const double tf = final_value(transfer_function(nominal(), pid));
  const double t_end = 20.0 / kGamma;
  const std::vector<double> grid{t_end};
  const double mq = run_moments(InitialState::ground(), nominal(), pid, {}, t_end, grid)[0].mom.m_q;
  o.check(std::abs(tf - target) <= 1e-3, fmt("transfer-function final value = %.9f", tf));
  o.check(std::abs(mq - target) <= 1e-3, fmt("<pi(Q)>(20/gamma) = %.9f", mq));
  o.summary = fmt("final value %.6f (tf), %.6f (moments), target %.6f", tf, mq, target);
  return o;
}

Outcome criterion_5() {
  Outcome o;
  const auto grid = uniform_grid(10.0 / kGamma, 11);
  const StepResponse zero_free = step_response(transfer_function(nominal(), PidParams(7, 33.6, 0, 0.0)), grid);
  const StepResponse with_zero = step_response(transfer_function(nominal(), PidParams(7, 33.6, 0, 1.0)), grid);
  const double a = zero_free.metrics.overshoot;
  const double b = with_zero.metrics.overshoot;
  o.check(std::abs(a - 0.05) <= 0.005, fmt("mu = 0 overshoot = %.4f %%", 100 * a));
  o.check(b > 0.055, fmt("mu = 1 overshoot = %.4f %%", 100 * b));
  o.details.push_back(fmt("     settling (mu = 0) = %.4f / gamma", zero_free.metrics.settling_time * kGamma));
  o.summary = fmt("overshoot %.2f %% (mu = 0), %.2f %% (mu = 1)", 100 * a, 100 * b);
  return o;
}

Outcome criterion_6() {
  Outcome o;
  int cond_total = 0, cond_ok = 0, uncond_total = 0, uncond_ok = 0;
  double worst_cond = 0.0, worst_uncond = 0.0;
  for (double n_ba : {0.01, 0.02, 0.05}) {
    for (double n_th : {0.0, 1.0}) {
      for (double d : {0.0, 0.5}) {
        const SystemParams sp = with_nba(n_ba, n_th, kGamma);
        const CovarianceState c = steady_state_covariances(sp, d);
        const VariancePair ref = analytic_conditional_variances(sp, PidParams(0, 0, d));
        const double eq = rel_err(c.v_q, ref.q);
        const double ep = rel_err(c.v_p, ref.p);
        worst_cond = std::max({worst_cond, eq, ep});
        ++cond_total;
        const bool ok = eq <= 0.01 && ep <= 0.01;
        cond_ok += ok;
        o.check(ok, fmt("steady n_BA=%.2f n_th=%g alpha_d=%.1f: V_Q %.6f vs %.6f (%.2f %%), V_P %.6f vs %.6f "
                        "(%.3f %%)",
                        n_ba, n_th, d, c.v_q, ref.q, 100 * eq, c.v_p, ref.p, 100 * ep));
        for (double ap : {0.0, 1.0, 5.0}) {
          const PidParams pid(ap, 0, d);
          const double v = stationary_variances(sp, pid).unconditional.q;
          const double r = analytic_unconditional_variances(sp, pid).q;
          const double e = rel_err(v, r);
          worst_uncond = std::max(worst_uncond, e);
          ++uncond_total;
          uncond_ok += e <= 0.01;
          o.check(e <= 0.01, fmt("moments n_BA=%.2f n_th=%g alpha_d=%.1f alpha_p=%g: V_Q %.6f vs %.6f (%.2f %%)",
                                 n_ba, n_th, d, ap, v, r, 100 * e));
        }
      }
    }
  }
  o.summary = fmt("weak-coupling oracles: steady %d/%d, moments %d/%d within 1 %% (worst %.2f %%, %.2f %%)",
                  cond_ok, cond_total, uncond_ok, uncond_total, 100 * worst_cond, 100 * worst_uncond);
  return o;
}

Outcome criterion_7() {
  Outcome o;
  const SystemParams sp = with_nba(0.02, 0.0, kDeskGamma);
  const PidParams pid(1, 0, 0);
  std::vector<double> grid;
  for (int k = 1; k <= 10; ++k) grid.push_back(2.0 * k / kDeskGamma);
  const double t_end = grid.back();
  EnsembleConfig cfg;
  cfg.trajectories = 2000;
  cfg.seed = 20240601;
  const EnsembleStats st = run_ensemble(InitialState::ground(), sp, pid, t_end, grid, cfg);
  const auto mom = run_moments(InitialState::ground(), sp, pid, {}, t_end, grid);
  const EnsembleComparison c = compare_with_moments(st, mom);
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double se = c.ode_excess_q[j] * std::sqrt(2.0 / (st.used - 1.0));
    const double total = c.cond_vq[j] + c.ens_var_q[j];
    const double v_q = c.cond_vq[j] + c.ode_excess_q[j];
    const double z_total = (total - v_q) / se;
    worst = std::max({worst, std::abs(c.z_var[j]), std::abs(z_total)});
    o.check(std::abs(c.z_var[j]) <= 3.0,
            fmt("t=%5.1f/gamma Var[pi(Q)] %.6f vs excess %.6f (z = %+.2f)", grid[j] * kDeskGamma, c.ens_var_q[j],
                c.ode_excess_q[j], c.z_var[j]));
    o.check(std::abs(z_total) <= 3.0,
            fmt("t=%5.1f/gamma V_cond + Var %.6f vs V_Q %.6f (z = %+.2f)", grid[j] * kDeskGamma, total, v_q, z_total));
  }
  o.check(st.aborted == 0, fmt("aborted trajectories = %zu", st.aborted));
  o.summary = fmt("Monte Carlo %zu trajectories, seed %llu, max |z| = %.2f", st.used,
                  static_cast<unsigned long long>(cfg.seed), worst);
  return o;
}

Outcome criterion_8() {
  Outcome o;
  // (a) no coupling: presets are fixed points of the covariance equations.
  // The derivative vanishes exactly; the sampled series may differ by the
  // rounding of the dense-output interpolant.
  {
    double rhs_max = 0.0, drift = 0.0;
    for (double n_th : {0.0, 1.0, 3.0}) {
      const SystemParams sp(kKappa, kGamma, 0.0, n_th);
      const InitialState init = InitialState::thermal(n_th);
      for (double d : {0.0, 0.5}) {
        for (double x : covariance_rhs(init.covariance, sp, d).to_array()) rhs_max = std::max(rhs_max, std::abs(x));
        const auto grid = uniform_grid(20.0 / kGamma, 21);
        for (const auto& s : integrate_covariances(init, sp, d, 20.0 / kGamma, grid)) {
          const auto a = s.value.to_array();
          const auto b = init.covariance.to_array();
          for (std::size_t i = 0; i < a.size(); ++i)
            drift = std::max(drift, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(b[i])));
        }
      }
    }
    o.check(rhs_max == 0.0, fmt("(a) g = 0 covariance derivative at presets, max |rhs| = %.3g", rhs_max));
    o.check(drift <= 1e-12, fmt("(a) g = 0 integrated series, max relative drift %.3g", drift));
  }
  // (b) covariances do not see alpha_p, alpha_i, mu or r.
  {
    const SystemParams sp = with_nba(0.05, 1.0, kDeskGamma);
    const double t_end = 10.0 / kDeskGamma;
    const auto grid = uniform_grid(t_end, 51);
    double worst = 0.0;
    for (double d : {0.0, 0.5}) {
      const auto base = run_moments(InitialState::thermal(1.0), sp, PidParams(0, 0, d), {}, t_end, grid);
      for (const PidParams& pid : {PidParams(5, 0, d), PidParams(0, 40, d, 1.0, SetpointSignal::step(1.0)),
                                   PidParams(7, 33.6, d, 0.0, SetpointSignal({{0, 0}, {2e3, 2.0}, {6e3, -1.0}}))}) {
        const auto run = run_moments(InitialState::thermal(1.0), sp, pid, {}, t_end, grid);
        for (std::size_t j = 0; j < grid.size(); ++j) {
          const auto a = base[j].cov.to_array();
          const auto b = run[j].cov.to_array();
          for (std::size_t i = 0; i < a.size(); ++i)
            worst = std::max(worst, std::abs(a[i] - b[i]) / std::max(1.0, std::abs(a[i])));
        }
      }
    }
    o.check(worst <= 1e-6, fmt("(b) covariance independent of P/I/mu/r, max relative deviation %.3g", worst));
  }
  // (c) integral action: transient squeezing, sigma decays.
  {
    const SystemParams sp = with_nba(0.02, 0.0, kDeskGamma);
    const double t_end = 20.0 / kDeskGamma;
    const auto grid = uniform_grid(t_end, 2001);
    const auto plain = run_moments(InitialState::ground(), sp, PidParams(), {}, t_end, grid);
    const auto integ = run_moments(InitialState::ground(), sp, PidParams(0, 10, 0), {}, t_end, grid);
    double dip = 0.0, peak = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      dip = std::min(dip, unconditional_variance(integ[j].cov, integ[j].mom).q -
                              unconditional_variance(plain[j].cov, plain[j].mom).q);
      peak = std::max(peak, integ[j].mom.s_qq);
    }
    const double sigma_end = integ.back().mom.sigma;
    o.check(dip < 0.0, fmt("(c) alpha_i = 10 transient V_Q dip %.4g below the no-feedback curve", dip));
    o.check(std::abs(sigma_end) < 1e-3 * peak,
            fmt("(c) |sigma(20/gamma)| = %.3g < 1e-3 * max s_qq = %.3g", std::abs(sigma_end), 1e-3 * peak));
  }
  // (d) the derivative gain 1/(1 + 2 alpha_p) minimises the stationary V_Q.
  {
    const SystemParams sp = with_nba(0.01, 0.0, kGamma);
    for (double ap : {1.0, 3.0}) {
      const double step = 0.01;
      double best_d = 0.0, best_v = 1e300;
      for (double d = 0.0; d <= 1.0 + 1e-12; d += step) {
        const double v = stationary_variances(sp, PidParams(ap, 0, d)).unconditional.q;
        if (v < best_v) {
          best_v = v;
          best_d = d;
        }
      }
      const double opt = optimal_derivative_gain(ap);
      o.check(std::abs(best_d - opt) <= step + 1e-12,
              fmt("(d) alpha_p = %g: sweep argmin alpha_d = %.2f, predicted %.4f", ap, best_d, opt));
    }
  }
  // (e) unconditional >= conditional.
  {
    double worst = 1e300;
    const double t_end = 10.0 / kDeskGamma;
    const auto grid = uniform_grid(t_end, 201);
    for (const PidParams& pid : {PidParams(), PidParams(1, 0, 0), PidParams(5, 20, 0.3),
                                 PidParams(7, 33.6, 0, 0.0, SetpointSignal::step(1.0))}) {
      for (double n_th : {0.0, 1.0}) {
        const auto run = run_moments(InitialState::thermal(n_th), with_nba(0.05, n_th, kDeskGamma), pid,
                                     {2e-4, 1e-4}, t_end, grid);
        for (const auto& s : run) {
          const VariancePair u = unconditional_variance(s.cov, s.mom);
          worst = std::min({worst, u.q - s.cov.v_q, u.p - s.cov.v_p});
        }
      }
    }
    o.check(worst >= -1e-9, fmt("(e) min(unconditional - conditional) = %.3g", worst));
  }
  // (f) open-loop force displacement.
  {
    const double t_end = 40.0 / kDeskGamma;
    double worst = 0.0;
    for (const ExternalForce f : {ExternalForce{kDeskGamma, 0.0}, ExternalForce{0.0, 2 * kDeskGamma},
                                  ExternalForce{-0.7 * kDeskGamma, 0.4 * kDeskGamma}}) {
      const DetectabilityReport r = detectability(f, with_nba(0.02, 0.0, kDeskGamma), PidParams(), t_end);
      const Displacement d = steady_displacement(f, kDeskGamma);
      if (d.q != 0.0) worst = std::max(worst, rel_err(r.closed_loop.q, d.q));
      if (d.p != 0.0) worst = std::max(worst, rel_err(r.closed_loop.p, d.p));
    }
    o.check(worst <= 0.005, fmt("(f) displacement vs (-F1/gamma, F2/gamma), worst %.4f %%", 100 * worst));
  }
  int passed = 0;
  for (const auto& d : o.details) passed += d.rfind("ok", 0) == 0;
  o.summary = fmt("property suite %d/%zu", passed, o.details.size());
  return o;
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4,
                                                       criterion_5, criterion_6, criterion_7, criterion_8};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o.ok = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu  %s  [%.1f s]\n", o.ok ? "PASS" : "FAIL", i + 1, o.summary.c_str(), secs);
    for (const auto& d : o.details) std::printf("        %s\n", d.c_str());
    std::fflush(stdout);
    failed += !o.ok;
  }
  return failed;
}
