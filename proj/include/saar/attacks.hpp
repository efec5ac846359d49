#pragma once

#include <cmath>

#include "saar/common.hpp"

namespace saar {

/// Componentwise exponential signal switched on at `start`:
///   out_j(t) = 0                           for t < start
///   out_j(t) = coeff_j · exp(rate_j · τ)   otherwise,
/// with τ = t − start (shifted clock) or τ = t (absolute clock).
struct ExpSignal {
  Vector coeff;
  Vector rate;
  double start = 0.0;
  bool absolute_clock = false;

  Eigen::Index size() const { return coeff.size(); }

  Vector operator()(double t) const {
    if (t < start) return Vector::Zero(coeff.size());
    const double tau = absolute_clock ? t : t - start;
    return coeff.cwiseProduct((rate * tau).array().exp().matrix());
  }

  /// C·exp(κτ) with C = ‖coeff‖, κ = max rate; bounds ‖(*this)(t)‖.
  double envelope(double t) const {
    if (t < start || coeff.size() == 0) return 0.0;
    const double tau = absolute_clock ? t : t - start;
    return coeff.norm() * std::exp(rate.maxCoeff() * tau);
  }
};

/// Injection on the control-input layer (γ^a, input-sized) and on the
/// observer layer (γ^ol, state-sized) of one follower.
struct AttackProfile {
  ExpSignal cil;
  ExpSignal ol;
};

struct AttackSample {
  Vector gamma_a;
  Vector gamma_ol;
};

inline AttackSample eval_attack(const AttackProfile& profile, double t) {
  return {profile.cil(t), profile.ol(t)};
}

/// Profile that never fires, sized for an agent with the given dimensions.
inline AttackProfile no_attack(Eigen::Index input_dim, Eigen::Index state_dim) {
  AttackProfile p;
  p.cil = {Vector::Zero(input_dim), Vector::Zero(input_dim), 0.0, false};
  p.ol = {Vector::Zero(state_dim), Vector::Zero(state_dim), 0.0, false};
  return p;
}

}  // namespace saar
