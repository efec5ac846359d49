#include <chrono>
#include <algorithm>
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/scenario.hpp"

namespace saar {
namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }

TEST(SolveRegulator, IdentityInput) {
  const auto cfg = reference_scenario();
  const auto& f = cfg.followers[0].model;
  const Matrix pi = solve_regulator(f, cfg.leader);
  EXPECT_LT((pi - (cfg.leader.S - f.A)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SolveRegulator, InvertibleInputMatchesDirectInverse) {
  const auto cfg = reference_scenario();
  const auto& f = cfg.followers[1].model;
  const Matrix pi = solve_regulator(f, cfg.leader);
  const Matrix direct = f.B.inverse() * (cfg.leader.S - f.A);
  EXPECT_LT((pi - direct).norm(), 1e-12);
  EXPECT_LT(regulator_residual(f, cfg.leader, pi), 1e-10);
}

TEST(SolveRegulator, ZeroInputUnsolvable) {
  AgentModel m{Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Identity(2, 2), Matrix::Identity(2, 2)};
  LeaderModel l{Matrix{{0.0, 1.0}, {-1.0, 0.0}}};
  EXPECT_THROW(solve_regulator(m, l), SolverError);
}

TEST(SolveCare, ScalarQuadraticFormula) {
  const AgentModel m{m1(-1.0), m1(1.0), m1(3.0), m1(1.0)};
  const Matrix p = solve_care(m);
  EXPECT_NEAR(p(0, 0), oracle::scalar_care(-1.0, 1.0, 3.0, 1.0), 1e-12);
  EXPECT_NEAR(p(0, 0), 1.0, 1e-12);
}

TEST(SolveCare, RandomScalarsAgreeWithQuadraticFormula) {
  for (double a : {-3.0, -0.2, 0.0, 0.7, 4.0})
    for (double b : {0.5, 2.0})
      for (double q : {0.1, 3.0}) {
        const AgentModel m{m1(a), m1(b), m1(q), m1(1.5)};
        EXPECT_NEAR(solve_care(m)(0, 0), oracle::scalar_care(a, b, q, 1.5), 1e-9)
            << a << " " << b << " " << q;
      }
}

TEST(SolveCare, UncontrollableRejected) {
  const AgentModel m{Matrix::Identity(2, 2), Matrix::Zero(2, 1), Matrix::Identity(2, 2), m1(1.0)};
  EXPECT_THROW(solve_care(m), AssumptionError);
}

TEST(SolveCare, FollowerOneMatchesHamiltonianOracle) {
  const auto cfg = reference_scenario();
  const auto& f = cfg.followers[0].model;
  const Matrix p = solve_care(f);
  EXPECT_TRUE(p.isApprox(p.transpose(), 0.0));
  EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(p).eigenvalues().minCoeff(), 0.0);
  EXPECT_LT(care_residual(f, p), 1e-8);
  const Matrix k = -f.U.inverse() * f.B.transpose() * p;
  EXPECT_LT(oracle::max_real_part(f.A + f.B * k), 0.0);
  EXPECT_LT((p - oracle::care_hamiltonian(f.A, f.B, f.Q, f.U)).norm(), 1e-9);
}

TEST(SolveCare, NonSquareInputAgainstOracle) {
  const Matrix a{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, -2.0, 0.5}};
  const Matrix b{{0.0}, {0.0}, {1.0}};
  const AgentModel m{a, b, Matrix::Identity(3, 3), m1(0.5)};
  const Matrix p = solve_care(m);
  EXPECT_LT(care_residual(m, p), 1e-8);
  EXPECT_LT((p - oracle::care_hamiltonian(a, b, m.Q, m.U)).norm(), 1e-8);
}

TEST(SynthesizeGains, ScalarToy) {
  const AgentModel m{m1(0.0), m1(1.0), m1(1.0), m1(1.0)};
  const auto g = synthesize_gains(m, LeaderModel{m1(0.0)});
  EXPECT_NEAR(g.P(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(g.K(0, 0), -1.0, 1e-12);
  EXPECT_NEAR(g.Pi(0, 0), 0.0, 1e-15);
  EXPECT_NEAR(g.H(0, 0), 1.0, 1e-12);
}

TEST(SynthesizeGains, FeedforwardIdentity) {
  const auto cfg = reference_scenario();
  const auto g = synthesize_gains(cfg.followers[2].model, cfg.leader);
  // H is formed as Π − K, so H + K recovers Π up to one rounding per entry.
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index i = 0; i < g.Pi.rows(); ++i)
    for (Eigen::Index j = 0; j < g.Pi.cols(); ++j)
      EXPECT_LE(std::abs(g.H(i, j) + g.K(i, j) - g.Pi(i, j)),
                2 * eps * std::max({std::abs(g.Pi(i, j)), std::abs(g.K(i, j)), std::abs(g.H(i, j))}))
          << i << "," << j;
}

TEST(SynthesizeGains, AllFollowersStableAndAccurate) {
  const auto cfg = reference_scenario();
  for (const auto& f : cfg.followers) {
    const auto g = synthesize_gains(f.model, cfg.leader);
    EXPECT_LE(g.care_residual, 1e-8);
    EXPECT_LE(g.regulator_residual, 1e-10);
    EXPECT_LT(oracle::max_real_part(f.model.A + f.model.B * g.K), 0.0);
  }
}

TEST(CheckLeader, PaperGenerator) {
  const auto cfg = reference_scenario();
  const auto chk = check_leader_assumption(cfg.leader);
  EXPECT_TRUE(chk.passed) << chk.reason;
  const auto ref = oracle::eigenvalues(cfg.leader.S);
  ASSERT_EQ(chk.eigenvalues.size(), 3u);
  // S is the cross-product matrix of w = (−1, 1, 2): spectrum {0, ±i‖w‖}.
  for (const auto& z : ref) EXPECT_NEAR(z.real(), 0.0, 1e-10);
  std::vector<double> ims;
  for (const auto& z : chk.eigenvalues) ims.push_back(z.imag());
  std::sort(ims.begin(), ims.end());
  EXPECT_NEAR(ims[0], -std::sqrt(6.0), 1e-10);
  EXPECT_NEAR(ims[1], 0.0, 1e-10);
  EXPECT_NEAR(ims[2], std::sqrt(6.0), 1e-10);
}

TEST(CheckLeader, Rejections) {
  EXPECT_FALSE(check_leader_assumption({Matrix::Identity(2, 2)}).passed);
  EXPECT_FALSE(check_leader_assumption({Matrix::Zero(2, 2)}).passed);
  EXPECT_TRUE(check_leader_assumption({Matrix::Zero(1, 1)}).passed);
}

}  // namespace
}  // namespace saar
