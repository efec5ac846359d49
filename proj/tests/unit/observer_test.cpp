#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "saar/observer.hpp"
#include "saar/scenario.hpp"
#include "saar/simulator.hpp"

namespace saar {
namespace {

Vector v3(double a, double b, double c) { return (Vector(3) << a, b, c).finished(); }

TEST(NeighborhoodXi, ConsensusFixedPoint) {
  const auto cfg = reference_scenario();
  const std::vector<Vector> same(4, v3(0.3, -1, 2));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_TRUE(neighborhood_xi(i, same, same, cfg.topology).isZero(0.0));
}

TEST(NeighborhoodXi, SingleEdge) {
  Topology t{Matrix::Zero(2, 2), Matrix::Zero(2, 1)};
  t.adjacency(0, 1) = 1.0;
  t.pinning(1, 0) = 1.0;
  const std::vector<Vector> z{v3(1, 0, 0), v3(0, 0, 0)};
  const std::vector<Vector> leaders{v3(0, 0, 0)};
  EXPECT_EQ(neighborhood_xi(0, z, leaders, t), v3(-1, 0, 0));
}

TEST(NeighborhoodXi, GlobalFormAgainstDenseOracle) {
  const auto cfg = reference_scenario();
  const auto phi = build_phi_family(cfg.topology);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vector> z(4), l(4);
    for (auto& v : z) v = v3(g(rng), g(rng), g(rng));
    for (auto& v : l) v = v3(g(rng), g(rng), g(rng));
    Vector stacked(12);
    for (std::size_t i = 0; i < 4; ++i)
      stacked.segment(static_cast<Eigen::Index>(3 * i), 3) = neighborhood_xi(i, z, l, cfg.topology);
    const Vector delta_o = oracle::containment_error(z, l, cfg.topology.adjacency, cfg.topology.pinning);
    const Vector want = oracle::stacked_xi(delta_o, cfg.topology.adjacency, cfg.topology.pinning, 3);
    EXPECT_LT((stacked - want).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ObserverDerivatives, Unforced) {
  const auto cfg = reference_scenario();
  const ObserverState st{v3(1, 2, 3), 0.7, 1.0};
  const auto r = observer_derivatives(st, Vector::Zero(3), Vector::Zero(3), cfg.leader);
  EXPECT_EQ(r.dzeta, cfg.leader.S * st.zeta);
  EXPECT_EQ(r.dtheta, 0.0);
}

TEST(ObserverDerivatives, UnitGain) {
  const ObserverState st{Vector::Zero(3), 0.0, 2.5};
  const auto r = observer_derivatives(st, v3(1, 0, 0), Vector::Zero(3), {Matrix::Zero(3, 3)});
  EXPECT_EQ(r.dzeta, v3(1, 0, 0));
  EXPECT_EQ(r.dtheta, 2.5);
}

TEST(ObserverDerivatives, HandExample) {
  const auto cfg = reference_scenario();
  const ObserverState st{v3(1, 1, 1), std::log(2.0), 1.0};
  EXPECT_EQ(cfg.leader.S * st.zeta, v3(-1, 3, -2));
  const auto r = observer_derivatives(st, v3(0, 1, 0), v3(0, 0, 1), cfg.leader);
  EXPECT_LT((r.dzeta - v3(-1, 5, -1)).norm(), 1e-14);
  EXPECT_EQ(r.dtheta, 1.0);
}

TEST(ObserverDerivatives, CapFlagsClamp) {
  const ObserverState st{Vector::Zero(1), 1000.0, 1.0};
  const auto r = observer_derivatives(st, Vector::Ones(1), Vector::Zero(1), {Matrix::Zero(1, 1)}, 5.0);
  EXPECT_TRUE(r.clamped);
  EXPECT_DOUBLE_EQ(r.dzeta(0), std::exp(5.0));
}

}  // namespace
}  // namespace saar
