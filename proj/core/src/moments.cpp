#include "quadsqueeze/moments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "quadsqueeze/covariance.hpp"

namespace qs {

MomentState MomentState::from_initial(const InitialState& init) {
  MomentState m;
  m.m_q = init.q;
  m.m_p = init.p;
  m.m_xa = init.xa;
  m.m_ya = init.ya;
  m.s_qq = init.q * init.q;
  m.s_pp = init.p * init.p;
  m.s_xaxa = init.xa * init.xa;
  m.s_xap = init.xa * init.p;
  m.sigma_dot = m.s_qq;
  return m;
}

std::array<double, MomentState::kSize> MomentState::to_array() const {
  return {m_q,   m_p,       m_xa,       m_ya,      s_qq,      s_pp,       s_xaxa,
          s_xap, sigma,     sigma_dot,  aux_int_mq, aux_int_r, aux_int_err};
}

MomentState MomentState::from_array(const std::array<double, kSize>& a) {
  MomentState m;
  m.m_q = a[0];
  m.m_p = a[1];
  m.m_xa = a[2];
  m.m_ya = a[3];
  m.s_qq = a[4];
  m.s_pp = a[5];
  m.s_xaxa = a[6];
  m.s_xap = a[7];
  m.sigma = a[8];
  m.sigma_dot = a[9];
  m.aux_int_mq = a[10];
  m.aux_int_r = a[11];
  m.aux_int_err = a[12];
  return m;
}

MomentState moment_rhs(const MomentState& s, const CovarianceState& cov,
                       const SystemParams& params, const PidParams& pid,
                       const ExternalForce& force, double t) {
  const double k = params.kappa();
  const double gm = params.gamma();
  const double G = params.g();
  const double a = pid.derivative_scale();
  const double kp = 0.5 * pid.alpha_p() * gm;
  const double ki = 0.25 * pid.alpha_i() * gm * gm;
  const double mu = pid.mu();
  const double r = pid.setpoint().value(t);
  const double R = s.aux_int_r;
  const double M = s.aux_int_mq;

  MomentState d;
  d.m_q = a * (-0.5 * gm * s.m_q + kp * (mu * r - s.m_q) + ki * (R - M)) - 0.5 * force.f1;
  d.m_p = G * s.m_xa - 0.5 * gm * s.m_p + 0.5 * force.f2;
  d.m_xa = -0.5 * k * s.m_xa;
  d.m_ya = G * s.m_q - 0.5 * k * s.m_ya;

  d.s_qq = 2.0 * a * (-0.5 * gm * s.s_qq + kp * (mu * r * s.m_q - s.s_qq) + ki * (R * s.m_q - s.sigma)) +
           2.0 * k * a * a * cov.v_yaq * cov.v_yaq - force.f1 * s.m_q;
  d.s_pp = 2.0 * G * s.s_xap - gm * s.s_pp + 2.0 * k * cov.v_yap * cov.v_yap + force.f2 * s.m_p;
  d.s_xaxa = -k * s.s_xaxa + 2.0 * k * cov.v_xaya * cov.v_xaya;
  d.s_xap = G * s.s_xaxa - 0.5 * (k + gm) * s.s_xap + 2.0 * k * cov.v_xaya * cov.v_yap +
            0.5 * force.f2 * s.m_xa;

  d.sigma = s.sigma_dot;
  d.sigma_dot = a * ((kp * mu * r + ki * R) * s.m_q + ki * r * M) -
                a * (1.0 + pid.alpha_p()) * 0.5 * gm * s.sigma_dot - 2.0 * a * ki * s.sigma +
                d.s_qq - 0.5 * force.f1 * s.m_q;

  d.aux_int_mq = s.m_q;
  d.aux_int_r = r;
  d.aux_int_err = r - s.m_q;
  return d;
}

double sigma_dot_jump(const MomentState& state, const SystemParams& params, const PidParams& pid,
                      double delta_r) {
  return pid.derivative_scale() * 0.5 * pid.alpha_p() * params.gamma() * pid.mu() * delta_r *
         state.aux_int_mq;
}

namespace {

constexpr std::size_t kCov = CovarianceState::kSize;
constexpr std::size_t kMom = MomentState::kSize;
constexpr std::size_t kJoint = kCov + kMom;
using Solver = DormandPrince45<kJoint>;
using Joint = Solver::State;

Joint pack(const CovarianceState& c, const MomentState& m) {
  Joint y{};
  const auto ca = c.to_array();
  const auto ma = m.to_array();
  std::copy(ca.begin(), ca.end(), y.begin());
  std::copy(ma.begin(), ma.end(), y.begin() + kCov);
  return y;
}

void unpack(const Joint& y, CovarianceState& c, MomentState& m) {
  std::array<double, kCov> ca;
  std::array<double, kMom> ma;
  std::copy(y.begin(), y.begin() + kCov, ca.begin());
  std::copy(y.begin() + kCov, y.end(), ma.begin());
  c = CovarianceState::from_array(ca);
  m = MomentState::from_array(ma);
}

}  // namespace

std::vector<MomentSample> run_moments(const InitialState& init, const SystemParams& params,
                                      const PidParams& pid, const ExternalForce& force,
                                      double t_end, std::span<const double> grid,
                                      const OdeOptions& opts) {
  if (!(t_end > 0.0)) throw std::invalid_argument("t_end must be > 0");
  if (!std::isfinite(force.f1) || !std::isfinite(force.f2))
    throw std::invalid_argument("force components must be finite");
  if (!std::is_sorted(grid.begin(), grid.end()) ||
      (!grid.empty() && (grid.front() < 0.0 || grid.back() > t_end)))
    throw std::invalid_argument("grid must be sorted and inside [0, t_end]");

  // r is constant on each segment; reading it at the segment start keeps the
  // stage at the right endpoint from seeing the next value.
  double seg_start = 0.0;
  auto rhs = [&](double, const Joint& y, Joint& dy) {
    CovarianceState c;
    MomentState m;
    unpack(y, c, m);
    const CovarianceState dc = covariance_rhs(c, params, pid.alpha_d());
    const MomentState dm = moment_rhs(m, c, params, pid, force, seg_start);
    dy = pack(dc, dm);
  };

  std::vector<MomentSample> out;
  out.reserve(grid.size());
  auto observe = [&out](double t, const Joint& y) {
    MomentSample s;
    s.t = t;
    unpack(y, s.cov, s.mom);
    out.push_back(s);
  };

  std::vector<double> bounds{0.0};
  for (double b : pid.setpoint().breakpoints())
    if (b < t_end) bounds.push_back(b);
  bounds.push_back(t_end);

  Joint y = pack(init.covariance, MomentState::from_initial(init));
  auto next = grid.begin();
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    const double a = bounds[i];
    const double b = bounds[i + 1];
    const bool last = i + 2 == bounds.size();
    auto stop = last ? grid.end() : std::lower_bound(next, grid.end(), b);
    seg_start = a;
    y = Solver::integrate(rhs, a, y, b, std::span<const double>(next, stop), observe, opts);
    next = stop;
    if (!last) {
      CovarianceState c;
      MomentState m;
      unpack(y, c, m);
      const double dr = pid.setpoint().value(b) - pid.setpoint().value(std::nextafter(b, 0.0));
      m.sigma_dot += sigma_dot_jump(m, params, pid, dr);
      y = pack(c, m);
    }
  }
  return out;
}

VariancePair unconditional_variance(const CovarianceState& cov, const MomentState& mom) {
  return {cov.v_q + mom.excess_q(), cov.v_p + mom.excess_p()};
}

StationaryVariances stationary_variances(const SystemParams& params, const PidParams& pid,
                                         double rel_change, const OdeOptions& opts) {
  const PidParams quiet = pid.with_setpoint({});
  auto rhs = [&](double t, const Joint& y, Joint& dy) {
    CovarianceState c;
    MomentState m;
    unpack(y, c, m);
    dy = pack(covariance_rhs(c, params, quiet.alpha_d()), moment_rhs(m, c, params, quiet, {}, t));
  };

  const double chunk = 5.0 * (1.0 + pid.alpha_d()) / params.gamma();
  const InitialState init = InitialState::thermal(params.n_th());
  Joint y = pack(init.covariance, MomentState::from_initial(init));
  VariancePair prev{-1.0, -1.0};
  double t = 0.0;
  for (int i = 0; i < 400; ++i) {
    y = Solver::integrate(rhs, t, y, t + chunk, {}, [](double, const Joint&) {}, opts);
    t += chunk;
    CovarianceState c;
    MomentState m;
    unpack(y, c, m);
    const VariancePair v = unconditional_variance(c, m);
    if (i > 0 && std::abs(v.q - prev.q) <= rel_change * std::abs(v.q) &&
        std::abs(v.p - prev.p) <= rel_change * std::abs(v.p)) {
      return {{c.v_q, c.v_p}, v, t};
    }
    prev = v;
  }
  throw ConvergenceError(std::abs(prev.q), "moment relaxation did not settle");
}

std::vector<double> uniform_grid(double t_end, std::size_t points) {
  if (points < 2) throw std::invalid_argument("uniform grid needs at least two points");
  std::vector<double> g(points);
  for (std::size_t i = 0; i < points; ++i)
    g[i] = t_end * static_cast<double>(i) / static_cast<double>(points - 1);
  g.back() = t_end;
  return g;
}

}  // namespace qs
