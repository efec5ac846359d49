#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/topology.hpp"

namespace saar {

/// Distributed observer of one follower: estimate ζ, adaptive log-gain ϑ and
/// adaptation constant q.
struct ObserverState {
  Vector zeta;
  double theta = 0.0;
  double q = 1.0;
};

inline constexpr double kDefaultExpCap = 700.0;

/// ξ_i = Σ_j a_ij (ζ_j − ζ_i) + Σ_r g_ir (x_r − ζ_i).
inline Vector neighborhood_xi(std::size_t i, std::span<const Vector> zetas,
                              std::span<const Vector> leader_states,
                              const Topology& topo) {
  const auto ii = static_cast<Eigen::Index>(i);
  Vector xi = Vector::Zero(zetas[i].size());
  for (std::size_t j = 0; j < zetas.size(); ++j) {
    const double a = topo.adjacency(ii, static_cast<Eigen::Index>(j));
    if (a != 0.0) xi += a * (zetas[j] - zetas[i]);
  }
  for (std::size_t r = 0; r < leader_states.size(); ++r) {
    const double g = topo.pinning(ii, static_cast<Eigen::Index>(r));
    if (g != 0.0) xi += g * (leader_states[r] - zetas[i]);
  }
  return xi;
}

struct ObserverRates {
  Vector dzeta;
  double dtheta = 0.0;
  bool clamped = false;  // exp(ϑ) hit the cap
};

/// ζ̇ = Sζ + exp(ϑ)ξ + γ^ol,  ϑ̇ = q‖ξ‖².
/// exp(ϑ) is evaluated at min(ϑ, theta_cap) so runaway adaptation cannot
/// overflow; `clamped` reports when that happens.
inline ObserverRates observer_derivatives(const ObserverState& state,
                                          const Vector& xi,
                                          const Vector& gamma_ol,
                                          const LeaderModel& leader,
                                          double theta_cap = kDefaultExpCap) {
  ObserverRates out;
  out.clamped = state.theta > theta_cap;
  const double gain = std::exp(std::min(state.theta, theta_cap));
  out.dzeta = leader.S * state.zeta + gain * xi + gamma_ol;
  out.dtheta = state.q * xi.squaredNorm();
  return out;
}

}  // namespace saar
