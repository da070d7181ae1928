#include <gtest/gtest.h>

#include <cmath>

#include "quadsqueeze/force.hpp"

using namespace qs;

namespace {

const double kGamma = 1e-3;

SystemParams desk(double n_ba) {
  return SystemParams(0.1, kGamma, SystemParams::coupling_for_back_action(n_ba, 0.1, kGamma));
}

}  // namespace

TEST(SteadyDisplacement, Examples) {
  const Displacement a = steady_displacement({kGamma, 0.0}, kGamma);
  EXPECT_DOUBLE_EQ(a.q, -1.0);
  EXPECT_EQ(a.p, 0.0);
  const Displacement b = steady_displacement({0.0, 0.0}, kGamma);
  EXPECT_EQ(b.q, 0.0);
  EXPECT_EQ(b.p, 0.0);
  const Displacement c = steady_displacement({0.0, 2 * kGamma}, kGamma);
  EXPECT_EQ(c.q, 0.0);
  EXPECT_DOUBLE_EQ(c.p, 2.0);
}

TEST(Detectability, NoFeedbackWeakCoupling) {
  const DetectabilityReport r = detectability({kGamma, 0.0}, SystemParams(0.1, kGamma, 0.0), PidParams(), 30 / kGamma);
  EXPECT_NEAR(r.vq, 0.5, 1e-9);
  EXPECT_NEAR(r.ratio, std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(r.closed_loop.q, -1.0, 1e-5);
  EXPECT_NEAR(r.closed_loop_ratio, std::sqrt(2.0), 1e-4);
}

TEST(Detectability, ZeroForce) {
  const DetectabilityReport r = detectability({}, desk(0.02), PidParams(1, 0, 0), 10 / kGamma);
  EXPECT_EQ(r.ratio, 0.0);
  EXPECT_EQ(r.closed_loop_ratio, 0.0);
}

TEST(Detectability, SqueezingRaisesOpenLoopRatio) {
  const ExternalForce f{kGamma, 0.0};
  const DetectabilityReport off = detectability(f, desk(0.02), PidParams(), 30 / kGamma);
  const DetectabilityReport on = detectability(f, desk(0.02), PidParams(1, 0, 0), 30 / kGamma);
  EXPECT_GT(on.ratio, off.ratio);
  EXPECT_LT(on.vq, off.vq);
}

TEST(Detectability, FeedbackSuppressesDisplacement) {
  const ExternalForce f{kGamma, 0.0};
  for (double ap : {1.0, 4.0}) {
    const DetectabilityReport r = detectability(f, desk(0.02), PidParams(ap, 0, 0), 30 / kGamma);
    EXPECT_NEAR(r.closed_loop.q, -1.0 / (1.0 + ap), 1e-5) << ap;
  }
}

TEST(Detectability, DisplacementIsLinearInForce) {
  const PidParams pid(2, 0, 0.3);
  const DetectabilityReport a = detectability({kGamma, -kGamma}, desk(0.02), pid, 10 / kGamma);
  const DetectabilityReport b = detectability({3 * kGamma, -3 * kGamma}, desk(0.02), pid, 10 / kGamma);
  EXPECT_NEAR(b.closed_loop.q, 3 * a.closed_loop.q, 1e-7);
  EXPECT_NEAR(b.closed_loop.p, 3 * a.closed_loop.p, 1e-7);
  EXPECT_NEAR(b.vq, a.vq, 1e-9);
}

TEST(Detectability, OpenLoopDisplacementReached) {
  for (const ExternalForce f : {ExternalForce{kGamma, 0.0}, ExternalForce{0.0, 2 * kGamma},
                                ExternalForce{-0.5 * kGamma, 0.3 * kGamma}}) {
    const DetectabilityReport r = detectability(f, desk(0.02), PidParams(), 40 / kGamma);
    const Displacement d = steady_displacement(f, kGamma);
    EXPECT_NEAR(r.closed_loop.q, d.q, 0.005 * std::abs(d.q) + 1e-12);
    EXPECT_NEAR(r.closed_loop.p, d.p, 0.005 * std::abs(d.p) + 1e-12);
  }
}
