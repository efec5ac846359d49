#pragma once

#include <algorithm>
#include <cmath>

#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"

namespace saar {

/// Adaptive attack compensator of one follower.
struct CompensatorState {
  double rho_hat = 0.0;  // log-gain ρ̂
  double alpha = 1.0;    // adaptation rate
  double c = 1.0;        // decay of the exp(−c t²) regulariser
};

struct ControlBreakdown {
  Vector u_c;        // conventional input
  Vector gamma_hat;  // compensation signal
  Vector u_r;        // resilient input, u_c − γ̂
  Vector u_bar;      // what the plant receives before filtering, u_r + γ^a
};

/// u_c = K x + H ζ.
inline Vector conventional_input(const GainSet& gains, const Vector& x,
                                 const Vector& zeta) {
  return gains.K * x + gains.H * zeta;
}

/// γ̂ = BᵀPε / (‖εᵀPB‖ + exp(−c t²)) · exp(ρ̂).
///
/// For ε = 0 the result is exactly zero even once exp(−c t²) underflows.
inline Vector compensation_signal(const AgentModel& model,
                                  const GainSet& gains, const Vector& eps,
                                  const CompensatorState& comp, double t,
                                  double rho_cap = 700.0) {
  const Vector v = model.B.transpose() * (gains.P * eps);
  const double nv = v.norm();
  if (nv == 0.0) return Vector::Zero(v.size());
  const double scale =
      std::exp(std::min(comp.rho_hat, rho_cap)) / (nv + std::exp(-comp.c * t * t));
  return scale * v;
}

/// ρ̂̇ = α‖εᵀPB‖.
inline double compensator_rate(const AgentModel& model, const GainSet& gains,
                               const Vector& eps,
                               const CompensatorState& comp) {
  return comp.alpha * (model.B.transpose() * (gains.P * eps)).norm();
}

inline ControlBreakdown corrupted_input(const Vector& u_c,
                                        const Vector& gamma_hat,
                                        const Vector& gamma_a) {
  ControlBreakdown out;
  out.u_c = u_c;
  out.gamma_hat = gamma_hat;
  out.u_r = u_c - gamma_hat;
  out.u_bar = out.u_r + gamma_a;
  return out;
}

}  // namespace saar
