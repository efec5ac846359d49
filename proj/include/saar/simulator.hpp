#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "saar/attacks.hpp"
#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/observer.hpp"
#include "saar/resilient_controller.hpp"
#include "saar/safety_filter.hpp"
#include "saar/scenario.hpp"
#include "saar/topology.hpp"

namespace saar {

/// Classical fourth-order Runge–Kutta step with a precomputed first stage.
template <class Deriv>
Vector rk4_step(Deriv&& f, double t, const Vector& y, double h, const Vector& k1) {
  const Vector k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
  const Vector k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
  const Vector k4 = f(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <class Deriv>
Vector rk4_step(Deriv&& f, double t, const Vector& y, double h) {
  return rk4_step(f, t, y, h, f(t, y));
}

/// Maps leader states to the per-follower points (Σ_ν Φ_ν ⊗ I)⁻¹ Σ_r (Φ_r ⊗ I)(1 ⊗ x_r)
/// that define containment. Row i of Σ_r Φ_r 1 x_rᵀ reduces to Σ_r g_ir x_r
/// because L1 = 0, so the Kronecker system collapses to Φ_sum Y = R.
class HullProjector {
 public:
  explicit HullProjector(const PhiFamily& phi)
      : lu_(phi.phi_sum), row_weights_(phi.phi.size()) {
    const Vector ones = Vector::Ones(phi.phi_sum.rows());
    for (std::size_t r = 0; r < phi.phi.size(); ++r) row_weights_[r] = phi.phi[r] * ones;
  }

  std::vector<Vector> reference(std::span<const Vector> leader_x) const {
    const Eigen::Index n_f = lu_.rows();
    const Eigen::Index n = leader_x.empty() ? 0 : leader_x[0].size();
    Matrix rhs = Matrix::Zero(n_f, n);
    for (std::size_t r = 0; r < leader_x.size(); ++r)
      rhs += row_weights_[r] * leader_x[r].transpose();
    const Matrix y = lu_.solve(rhs);
    std::vector<Vector> out(static_cast<std::size_t>(n_f));
    for (Eigen::Index i = 0; i < n_f; ++i) out[static_cast<std::size_t>(i)] = y.row(i).transpose();
    return out;
  }

  /// Stacked z − reference(leader_x).
  Vector error(std::span<const Vector> z, std::span<const Vector> leader_x) const {
    const auto ref = reference(leader_x);
    const Eigen::Index n = z.empty() ? 0 : z[0].size();
    Vector e(static_cast<Eigen::Index>(z.size()) * n);
    for (std::size_t i = 0; i < z.size(); ++i)
      e.segment(static_cast<Eigen::Index>(i) * n, n) = z[i] - ref[i];
    return e;
  }

 private:
  Eigen::PartialPivLU<Matrix> lu_;
  std::vector<Vector> row_weights_;
};

/// e_c: stacked follower states minus their containment references.
inline Vector containment_error(std::span<const Vector> follower_x,
                                std::span<const Vector> leader_x,
                                const PhiFamily& phi) {
  return HullProjector(phi).error(follower_x, leader_x);
}

/// Δ_o: same construction applied to the observer estimates.
inline Vector observer_containment_error(std::span<const Vector> zetas,
                                         std::span<const Vector> leader_x,
                                         const PhiFamily& phi) {
  return HullProjector(phi).error(zetas, leader_x);
}

struct WorldState {
  double t = 0.0;
  std::vector<Vector> follower_x;
  std::vector<Vector> leader_x;
  std::vector<ObserverState> observer;
  std::vector<double> rho_hat;
};

struct AgentTrace {
  Vector x, zeta, xi, eps;
  double theta = 0.0;
  double rho_hat = 0.0;
  Vector gamma_a, gamma_ol;
  Vector u_c, gamma_hat, u_r, u_bar, u, delta_u;
  bool infeasible = false;
};

/// Everything observable at the start of one integration step.
struct TraceRecord {
  double t = 0.0;
  std::vector<AgentTrace> agents;
  std::vector<Vector> leader_x;
  Vector e_c;
  Vector delta_o;
  std::vector<AgentPair> pairs;  // lexicographic
  std::vector<double> distance;
  std::vector<double> h;
  std::vector<bool> active;
};

enum class Termination { kCompleted, kInfeasibleQp, kNonFinite };

struct Summary {
  ControllerMode mode = ControllerMode::kSaar;
  double horizon = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  double final_time = 0.0;
  double max_ec = 0.0;
  double max_ec_tail = 0.0;  // sup of ‖e_c‖ over the last 30% of the horizon
  double tail_start = 0.0;
  double min_pair_distance = std::numeric_limits<double>::infinity();
  double min_pair_distance_time = 0.0;
  std::optional<double> first_divergence_time;
  std::vector<double> final_theta;
  std::vector<double> final_rho;
  std::size_t qp_infeasible_count = 0;
  double max_delta_u = 0.0;
  std::size_t clamp_events = 0;
  double wall_clock_seconds = 0.0;
  Termination termination = Termination::kCompleted;
  std::string message;
};

struct RunResult {
  std::vector<TraceRecord> trace;  // every output_stride-th step plus the final state
  std::vector<double> times;       // every step
  std::vector<double> ec_norm;     // ‖e_c‖ at every step
  Summary summary;
};

/// Closed-loop simulator. Construction validates the scenario, builds Φ and
/// synthesises every follower's gains.
class Simulator {
 public:
  using Warn = std::function<void(const std::string&)>;

  explicit Simulator(ScenarioConfig cfg, Warn warn = default_warn())
      : cfg_(std::move(cfg)), warn_(std::move(warn)) {
    if (const auto issues = validate_scenario(cfg_); !issues.empty()) {
      std::string msg = "invalid scenario:";
      for (const auto& is : issues) msg += "\n  " + is.field + ": " + is.message;
      throw AssumptionError(msg);
    }
    phi_ = build_phi_family(cfg_.topology);
    hull_.emplace(phi_);
    for (const auto& f : cfg_.followers) {
      models_.push_back(f.model);
      gains_.push_back(synthesize_gains(f.model, cfg_.leader));
    }
    filter_.d_s = cfg_.d_s;
    filter_.delta = cfg_.delta;
    filter_.policy = cfg_.infeasible_policy;
    bool any_bounds = false;
    for (const auto& f : cfg_.followers) any_bounds = any_bounds || f.bounds.has_value();
    if (any_bounds)
      for (const auto& f : cfg_.followers) filter_.bounds.push_back(f.bounds);
    n_ = cfg_.state_dim();
  }

  const ScenarioConfig& config() const { return cfg_; }
  const PhiFamily& phi() const { return phi_; }
  const std::vector<GainSet>& gains() const { return gains_; }
  const HullProjector& hull() const { return *hull_; }

  WorldState initial_state() const {
    WorldState w;
    w.leader_x = cfg_.leader_x0;
    for (const auto& f : cfg_.followers) {
      w.follower_x.push_back(f.x0);
      w.observer.push_back({f.zeta0.value_or(f.x0), f.theta0, f.q});
      w.rho_hat.push_back(f.rho0);
    }
    return w;
  }

  struct StepResult {
    WorldState next;
    TraceRecord record;
  };

  /// One RK4 step of the coupled system; `record` describes `world` itself.
  StepResult step(const WorldState& world) const { return step(world, cfg_.dt); }

  StepResult step(const WorldState& world, double dt) const {
    TraceRecord rec;
    const Vector y = pack(world);
    const Vector k1 = derivative(world.t, y, &rec);
    auto f = [this](double t, const Vector& s) { return derivative(t, s, nullptr); };
    const Vector y_next = rk4_step(f, world.t, y, dt, k1);
    if (!y_next.allFinite()) {
      throw NumericalError("non-finite state after step at t = " + std::to_string(world.t),
                           world.t);
    }
    StepResult out{unpack(y_next, world.t + dt), std::move(rec)};
    return out;
  }

  /// Full trajectory over the configured horizon.
  RunResult run() const {
    const auto wall0 = std::chrono::steady_clock::now();
    RunResult res;
    Summary& s = res.summary;
    s.mode = cfg_.mode;
    s.horizon = cfg_.horizon;
    s.dt = cfg_.dt;
    s.tail_start = 0.7 * cfg_.horizon;

    const auto steps = static_cast<std::size_t>(std::llround(cfg_.horizon / cfg_.dt));
    WorldState w = initial_state();
    auto account = [&](const TraceRecord& rec) {
      const double ec = rec.e_c.norm();
      res.times.push_back(rec.t);
      res.ec_norm.push_back(ec);
      s.max_ec = std::max(s.max_ec, ec);
      if (rec.t >= s.tail_start - 1e-12) s.max_ec_tail = std::max(s.max_ec_tail, ec);
      if (!s.first_divergence_time && ec > cfg_.divergence_threshold) s.first_divergence_time = rec.t;
      for (std::size_t k = 0; k < rec.distance.size(); ++k) {
        if (rec.distance[k] < s.min_pair_distance) {
          s.min_pair_distance = rec.distance[k];
          s.min_pair_distance_time = rec.t;
        }
      }
      for (const auto& a : rec.agents) {
        s.max_delta_u = std::max(s.max_delta_u, a.delta_u.norm());
        if (a.infeasible) ++s.qp_infeasible_count;
        if (a.theta > cfg_.theta_cap || a.rho_hat > cfg_.rho_cap) ++s.clamp_events;
      }
    };

    try {
      for (std::size_t k = 0; k < steps; ++k) {
        w.t = static_cast<double>(k) * cfg_.dt;
        auto [next, rec] = step(w);
        account(rec);
        if (k % static_cast<std::size_t>(cfg_.output_stride) == 0) res.trace.push_back(std::move(rec));
        w = std::move(next);
        ++s.steps;
      }
      w.t = static_cast<double>(steps) * cfg_.dt;
      TraceRecord last;
      (void)derivative(w.t, pack(w), &last);
      account(last);
      res.trace.push_back(std::move(last));
    } catch (const InfeasibleQpError& e) {
      s.termination = Termination::kInfeasibleQp;
      s.message = std::string(e.what()) + " at t = " + std::to_string(w.t);
      ++s.qp_infeasible_count;
    } catch (const NumericalError& e) {
      s.termination = Termination::kNonFinite;
      s.message = e.what();
    }
    if (s.clamp_events > 0) {
      warn_("adaptive gain exceeded the exp() cap on " + std::to_string(s.clamp_events) +
            " samples; results past that point are clamped");
    }
    s.final_time = w.t;
    for (std::size_t i = 0; i < w.observer.size(); ++i) {
      s.final_theta.push_back(w.observer[i].theta);
      s.final_rho.push_back(w.rho_hat[i]);
    }
    s.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
    return res;
  }

  // Flat layout: [x_1..x_N, x_r1..x_rM, ζ_1..ζ_N, ϑ_1..ϑ_N, ρ̂_1..ρ̂_N].
  Vector pack(const WorldState& w) const {
    const std::size_t nf = w.follower_x.size(), nl = w.leader_x.size();
    Vector y(static_cast<Eigen::Index>((2 * nf + nl) * static_cast<std::size_t>(n_) + 2 * nf));
    Eigen::Index o = 0;
    for (const auto& v : w.follower_x) { y.segment(o, n_) = v; o += n_; }
    for (const auto& v : w.leader_x) { y.segment(o, n_) = v; o += n_; }
    for (const auto& ob : w.observer) { y.segment(o, n_) = ob.zeta; o += n_; }
    for (const auto& ob : w.observer) y(o++) = ob.theta;
    for (const double r : w.rho_hat) y(o++) = r;
    return y;
  }

  WorldState unpack(const Vector& y, double t) const {
    const std::size_t nf = cfg_.n_followers(), nl = cfg_.n_leaders();
    WorldState w;
    w.t = t;
    Eigen::Index o = 0;
    for (std::size_t i = 0; i < nf; ++i) { w.follower_x.push_back(y.segment(o, n_)); o += n_; }
    for (std::size_t r = 0; r < nl; ++r) { w.leader_x.push_back(y.segment(o, n_)); o += n_; }
    for (std::size_t i = 0; i < nf; ++i) {
      w.observer.push_back({y.segment(o, n_), 0.0, cfg_.followers[i].q});
      o += n_;
    }
    for (std::size_t i = 0; i < nf; ++i) w.observer[i].theta = y(o++);
    for (std::size_t i = 0; i < nf; ++i) w.rho_hat.push_back(y(o++));
    return w;
  }

  /// Right-hand side of the closed loop; fills `rec` when given.
  Vector derivative(double t, const Vector& y, TraceRecord* rec) const {
    const WorldState w = unpack(y, t);
    const std::size_t nf = cfg_.n_followers();
    const bool adaptive = cfg_.mode != ControllerMode::kConventional;

    std::vector<Vector> zetas(nf);
    for (std::size_t i = 0; i < nf; ++i) zetas[i] = w.observer[i].zeta;

    std::vector<Vector> xi(nf), dzeta(nf), u_bar(nf), eps(nf);
    std::vector<double> dtheta(nf, 0.0), drho(nf, 0.0);
    std::vector<AttackSample> attack(nf);
    std::vector<ControlBreakdown> ctrl(nf);
    for (std::size_t i = 0; i < nf; ++i) {
      const auto& fc = cfg_.followers[i];
      attack[i] = eval_attack(fc.attack, t);
      xi[i] = neighborhood_xi(i, zetas, w.leader_x, cfg_.topology);
      const ObserverRates obs =
          observer_derivatives(w.observer[i], xi[i], attack[i].gamma_ol, cfg_.leader, cfg_.theta_cap);
      dzeta[i] = obs.dzeta;
      if (adaptive) dtheta[i] = obs.dtheta;

      eps[i] = w.follower_x[i] - zetas[i];
      const Vector u_c = conventional_input(gains_[i], w.follower_x[i], zetas[i]);
      Vector gamma_hat = Vector::Zero(u_c.size());
      if (adaptive) {
        const CompensatorState comp{w.rho_hat[i], fc.alpha, fc.c};
        gamma_hat = compensation_signal(models_[i], gains_[i], eps[i], comp, t, cfg_.rho_cap);
        drho[i] = compensator_rate(models_[i], gains_[i], eps[i], comp);
      }
      ctrl[i] = corrupted_input(u_c, gamma_hat, attack[i].gamma_a);
      u_bar[i] = ctrl[i].u_bar;
    }

    SequentialResult filtered;
    std::vector<Vector> u = u_bar;
    if (cfg_.mode == ControllerMode::kSaar) {
      try {
        filtered = sequential_filter(u_bar, w.follower_x, models_, filter_);
      } catch (const InfeasibleQpError& e) {
        throw InfeasibleQpError(std::string(e.what()) + " (t = " + std::to_string(t) + ")",
                                e.agent(), e.conflicting_pairs(), t);
      }
      for (std::size_t i = 0; i < nf; ++i) u[i] = filtered.agents[i].u;
    }

    Vector dy(y.size());
    Eigen::Index o = 0;
    for (std::size_t i = 0; i < nf; ++i) {
      dy.segment(o, n_) = models_[i].A * w.follower_x[i] + models_[i].B * u[i];
      o += n_;
    }
    for (const auto& xr : w.leader_x) { dy.segment(o, n_) = cfg_.leader.S * xr; o += n_; }
    for (std::size_t i = 0; i < nf; ++i) { dy.segment(o, n_) = dzeta[i]; o += n_; }
    for (std::size_t i = 0; i < nf; ++i) dy(o++) = dtheta[i];
    for (std::size_t i = 0; i < nf; ++i) dy(o++) = drho[i];

    if (rec != nullptr) {
      rec->t = t;
      rec->leader_x = w.leader_x;
      rec->e_c = hull_->error(w.follower_x, w.leader_x);
      rec->delta_o = hull_->error(zetas, w.leader_x);
      rec->agents.resize(nf);
      for (std::size_t i = 0; i < nf; ++i) {
        AgentTrace& a = rec->agents[i];
        a.x = w.follower_x[i];
        a.zeta = zetas[i];
        a.xi = xi[i];
        a.eps = eps[i];
        a.theta = w.observer[i].theta;
        a.rho_hat = w.rho_hat[i];
        a.gamma_a = attack[i].gamma_a;
        a.gamma_ol = attack[i].gamma_ol;
        a.u_c = ctrl[i].u_c;
        a.gamma_hat = ctrl[i].gamma_hat;
        a.u_r = ctrl[i].u_r;
        a.u_bar = ctrl[i].u_bar;
        a.u = u[i];
        a.delta_u = u[i] - u_bar[i];
        a.infeasible = !filtered.agents.empty() && filtered.agents[i].infeasible;
      }
      for (std::size_t i = 0; i < nf; ++i) {
        for (std::size_t j = i + 1; j < nf; ++j) {
          rec->pairs.push_back({i, j});
          rec->distance.push_back((w.follower_x[i] - w.follower_x[j]).norm());
          rec->h.push_back(cbf_value(w.follower_x[i], w.follower_x[j], cfg_.d_s));
          bool act = false;
          if (!filtered.agents.empty()) {
            for (const auto& p : filtered.agents[i].active_set) act = act || (p.j == j);
          }
          rec->active.push_back(act);
        }
      }
    }
    return dy;
  }

  static Warn default_warn() {
    return [](const std::string& msg) { std::clog << "warning: " << msg << '\n'; };
  }

 private:
  ScenarioConfig cfg_;
  Warn warn_;
  PhiFamily phi_;
  std::optional<HullProjector> hull_;
  std::vector<AgentModel> models_;
  std::vector<GainSet> gains_;
  FilterParams filter_;
  Eigen::Index n_ = 0;
};

}  // namespace saar
