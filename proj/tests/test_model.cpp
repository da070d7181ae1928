#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "quadsqueeze/model.hpp"

using namespace qs;

TEST(BackAction, Examples) {
  EXPECT_NEAR(back_action_number(SystemParams(0.1, 1e-5, 1.5e-3)), 4.5, 1e-12);
  EXPECT_EQ(back_action_number(SystemParams(0.1, 1e-5, 0.0)), 0.0);
  EXPECT_NEAR(back_action_number(SystemParams(0.1, 1e-3, 1.5e-3)), 0.045, 1e-15);
}

TEST(BackAction, CouplingInverts) {
  for (double n : {0.0, 0.01, 0.02, 0.05, 4.5}) {
    const double g = SystemParams::coupling_for_back_action(n, 0.1, 1e-5);
    EXPECT_NEAR(back_action_number(SystemParams(0.1, 1e-5, g)), n, 1e-12 * (1 + n));
  }
}

TEST(SystemParams, Validation) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(SystemParams(0.0, 1e-5, 0.0), std::invalid_argument);
  EXPECT_THROW(SystemParams(0.1, -1e-5, 0.0), std::invalid_argument);
  EXPECT_THROW(SystemParams(0.1, 1e-5, -1.0), std::invalid_argument);
  EXPECT_THROW(SystemParams(0.1, 1e-5, 0.0, -0.5), std::invalid_argument);
  EXPECT_THROW(SystemParams(nan, 1e-5, 0.0), std::invalid_argument);
  EXPECT_THROW(SystemParams(0.1, 1e-5, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(PidParams, Validation) {
  EXPECT_NO_THROW(PidParams(1.0, 2.0, -0.5));
  EXPECT_THROW(PidParams(-1.0, 0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PidParams(0.0, -1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(PidParams(0.0, 0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(PidParams(0.0, 0.0, -2.0), std::invalid_argument);
  EXPECT_THROW(require_valid_derivative_gain(-1.0), std::invalid_argument);
  EXPECT_DOUBLE_EQ(PidParams(0, 0, 0.25).derivative_scale(), 0.8);
}

TEST(InitialState, Presets) {
  const CovarianceState g = InitialState::ground_covariance();
  EXPECT_EQ(g.v_q, 0.5);
  EXPECT_EQ(g.v_p, 0.5);
  EXPECT_EQ(g.v_xa, 0.5);
  EXPECT_EQ(g.v_ya, 0.5);
  EXPECT_EQ(g.v_qp + g.v_xaya + g.v_xaq + g.v_xap + g.v_yaq + g.v_yap, 0.0);

  const CovarianceState t = InitialState::thermal_covariance(2.0);
  EXPECT_EQ(t.v_q, 2.5);
  EXPECT_EQ(t.v_p, 2.5);
  EXPECT_EQ(t.v_xa, 0.5);
  EXPECT_EQ(t.v_ya, 0.5);
  EXPECT_EQ(t.v_qp + t.v_xaya + t.v_xaq + t.v_xap + t.v_yaq + t.v_yap, 0.0);

  EXPECT_EQ(InitialState::thermal(0.0), InitialState::ground());
  const auto m = InitialState::ground().with_means(1.0, 2.0);
  EXPECT_EQ(m.q, 1.0);
  EXPECT_EQ(m.p, 2.0);
  EXPECT_EQ(m.covariance, g);
}

TEST(AnalyticConditional, Examples) {
  const double g45 = SystemParams::coupling_for_back_action(4.5, 0.1, 1e-5);
  for (double a : {0.0, 1.0, 5.0})
    EXPECT_NEAR(analytic_conditional_variances(SystemParams(0.1, 1e-5, g45), PidParams(a, 0, 0)).p, 5.0,
                1e-12);

  const auto free = analytic_conditional_variances(SystemParams(0.1, 1e-5, 0.0), PidParams());
  EXPECT_EQ(free.q, 0.5);
  EXPECT_EQ(free.p, 0.5);

  const double g02 = SystemParams::coupling_for_back_action(0.02, 0.1, 1e-5);
  EXPECT_NEAR(analytic_conditional_variances(SystemParams(0.1, 1e-5, g02), PidParams()).q, 0.48, 1e-12);
}

TEST(AnalyticUnconditional, Examples) {
  const double g02 = SystemParams::coupling_for_back_action(0.02, 0.1, 1e-5);
  const SystemParams sp(0.1, 1e-5, g02);
  EXPECT_NEAR(analytic_unconditional_variances(sp, PidParams(1, 0, 0)).q, 0.49, 1e-12);
  EXPECT_NEAR(analytic_unconditional_variances(sp, PidParams(1, 0, 1.0 / 3)).q, 0.48875, 1e-12);
  for (double n_th : {0.0, 1.0, 3.0})
    EXPECT_NEAR(analytic_unconditional_variances(SystemParams(0.1, 1e-5, g02, n_th), PidParams()).q,
                n_th + 0.5, 1e-12);
}

TEST(AnalyticUnconditional, OptimalDerivativeGainMaximisesFactor) {
  for (double ap : {0.0, 0.5, 1.0, 5.0, 20.0}) {
    const double best = optimal_derivative_gain(ap);
    EXPECT_DOUBLE_EQ(best, 1.0 / (1.0 + 2.0 * ap));
    const double f = unconditional_squeezing_factor(ap, best);
    for (double d = -0.9; d <= 5.0; d += 0.01) EXPECT_LE(unconditional_squeezing_factor(ap, d), f + 1e-15);
  }
}
