#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "saar/resilient_controller.hpp"
#include "saar/scenario.hpp"

namespace saar {
namespace {

Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }
Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

TEST(ConventionalInput, MatchedStateGivesFeedforward) {
  const auto cfg = reference_scenario();
  const auto g = synthesize_gains(cfg.followers[1].model, cfg.leader);
  const Vector x = v3(0.4, -1.0, 2.0);
  EXPECT_LT((conventional_input(g, x, x) - g.Pi * x).norm(), 1e-13);
  EXPECT_TRUE(conventional_input(g, Vector::Zero(3), Vector::Zero(3)).isZero(0.0));
}

TEST(ConventionalInput, ScalarToy) {
  GainSet g;
  g.K = m1(-1.0);
  g.H = m1(1.0);
  EXPECT_EQ(conventional_input(g, m1(2.0), m1(3.0))(0), 1.0);
}

struct ScalarToy : ::testing::Test {
  AgentModel model{m1(0.0), m1(1.0), m1(1.0), m1(1.0)};
  GainSet gains;
  void SetUp() override { gains.P = m1(1.0); }
};

TEST_F(ScalarToy, CompensationValue) {
  const CompensatorState comp{std::log(2.0), 1.0, 1.0};
  const Vector gh = compensation_signal(model, gains, m1(0.5), comp, 0.0);
  EXPECT_NEAR(gh(0), 2.0 / 3.0, 1e-15);
}

TEST_F(ScalarToy, CompensationVanishesAtZeroError) {
  const CompensatorState comp{3.0, 1.0, 1.0};
  EXPECT_TRUE(compensation_signal(model, gains, m1(0.0), comp, 0.0).isZero(0.0));
  EXPECT_TRUE(compensation_signal(model, gains, m1(0.0), comp, 100.0).isZero(0.0));
  EXPECT_EQ(compensator_rate(model, gains, m1(0.0), comp), 0.0);
}

TEST_F(ScalarToy, RateValueAndLinearity) {
  const CompensatorState comp{0.0, 2.0, 1.0};
  EXPECT_DOUBLE_EQ(compensator_rate(model, gains, m1(0.5), comp), 1.0);
  const CompensatorState twice{0.0, 4.0, 1.0};
  EXPECT_DOUBLE_EQ(compensator_rate(model, gains, m1(0.5), twice), 2.0);
}

TEST(CompensationSignal, SaturatesToExpRho) {
  const auto cfg = reference_scenario();
  const auto& m = cfg.followers[1].model;
  const auto g = synthesize_gains(m, cfg.leader);
  const CompensatorState comp{1.3, 1.0, 1.0};
  const Vector eps = v3(3.0, -2.0, 5.0);
  const Vector gh = compensation_signal(m, g, eps, comp, 10.0);
  const Vector dir = m.B.transpose() * g.P * eps;
  EXPECT_NEAR(gh.norm(), std::exp(1.3), 1e-12);
  EXPECT_NEAR(gh.normalized().dot(dir.normalized()), 1.0, 1e-14);
}

TEST(CorruptedInput, Compositions) {
  const Vector uc = v3(1, 0, 0);
  auto b = corrupted_input(uc, Vector::Zero(3), Vector::Zero(3));
  EXPECT_EQ(b.u_bar, uc);
  b = corrupted_input(uc, v3(0.3, 2, -1), v3(0.3, 2, -1));
  EXPECT_EQ(b.u_bar, uc);
  b = corrupted_input(uc, v3(0, 1, 0), v3(0, 0, 2));
  EXPECT_EQ(b.u_r, v3(1, -1, 0));
  EXPECT_EQ(b.u_bar, v3(1, -1, 2));
}

}  // namespace
}  // namespace saar
