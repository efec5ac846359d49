#include <cmath>

#include <gtest/gtest.h>

#include "saar/attacks.hpp"
#include "saar/scenario.hpp"

namespace saar {
namespace {

TEST(EvalAttack, OnsetValue) {
  const auto cfg = reference_scenario();
  const auto s = eval_attack(cfg.followers[0].attack, 3.0);
  EXPECT_EQ(s.gamma_a, (Vector(3) << 2.5, 1.5, -6.6).finished());
}

TEST(EvalAttack, ZeroBeforeOnset) {
  const auto cfg = reference_scenario();
  for (const auto& f : cfg.followers) {
    for (double t : {0.0, 1.5, 2.999999}) {
      const auto s = eval_attack(f.attack, t);
      EXPECT_TRUE(s.gamma_a.isZero(0.0));
      EXPECT_TRUE(s.gamma_ol.isZero(0.0));
    }
  }
}

TEST(EvalAttack, ObserverLayerTenSecondsIn) {
  const auto cfg = reference_scenario();
  const auto s = eval_attack(cfg.followers[1].attack, 13.0);
  const Vector want = (Vector(3) << 3.3 * std::exp(0.6), -2.2 * std::exp(1.5),
                       -1.7 * std::exp(1.2)).finished();
  EXPECT_LT((s.gamma_ol - want).norm(), 1e-12);
}

TEST(EvalAttack, AbsoluteClock) {
  ExpSignal sig{Vector::Ones(1), Vector::Constant(1, 0.5), 2.0, true};
  EXPECT_DOUBLE_EQ(sig(4.0)(0), std::exp(2.0));
  EXPECT_EQ(sig(1.0)(0), 0.0);
}

TEST(EvalAttack, EnvelopeBoundsNorm) {
  const auto cfg = reference_scenario();
  for (const auto& f : cfg.followers)
    for (double t = 3.0; t < 20.0; t += 0.37) {
      EXPECT_LE(f.attack.cil(t).norm(), f.attack.cil.envelope(t) * (1 + 1e-15));
      EXPECT_LE(f.attack.ol(t).norm(), f.attack.ol.envelope(t) * (1 + 1e-15));
    }
}

}  // namespace
}  // namespace saar
