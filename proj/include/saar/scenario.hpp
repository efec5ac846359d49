#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "saar/attacks.hpp"
#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/observer.hpp"
#include "saar/safety_filter.hpp"
#include "saar/topology.hpp"

namespace saar {

enum class ControllerMode {
  kSaar,             // adaptive observer + compensation + safety QP
  kResilientUnsafe,  // adaptive observer + compensation, no QP
  kConventional,     // fixed-gain observer, u = Kx + Hζ, raw attacks, no QP
};

inline std::string to_string(ControllerMode mode) {
  switch (mode) {
    case ControllerMode::kSaar: return "saar";
    case ControllerMode::kResilientUnsafe: return "resilient_unsafe";
    case ControllerMode::kConventional: return "conventional";
  }
  return "?";
}

inline std::optional<ControllerMode> parse_mode(const std::string& s) {
  if (s == "saar") return ControllerMode::kSaar;
  if (s == "resilient_unsafe") return ControllerMode::kResilientUnsafe;
  if (s == "conventional") return ControllerMode::kConventional;
  return std::nullopt;
}

struct FollowerConfig {
  AgentModel model;
  AttackProfile attack;
  Vector x0;
  std::optional<Vector> zeta0;  // defaults to x0
  double theta0 = 0.0;
  double rho0 = 0.0;
  double q = 1.0;
  double alpha = 1.0;
  double c = 1.0;
  std::optional<InputBounds> bounds;
};

/// Complete, declarative description of one experiment.
struct ScenarioConfig {
  std::string name;
  LeaderModel leader;
  std::vector<Vector> leader_x0;
  Topology topology;
  std::vector<FollowerConfig> followers;

  double d_s = 0.3;
  Matrix delta;  // N x N; (i, j) with i < j is δ_ij

  double attack_start = 3.0;
  bool absolute_clock = false;

  double horizon = 16.0;
  double dt = 1e-3;
  ControllerMode mode = ControllerMode::kSaar;
  int output_stride = 10;
  double theta_cap = kDefaultExpCap;
  double rho_cap = kDefaultExpCap;
  double divergence_threshold = 1e3;
  InfeasiblePolicy infeasible_policy = InfeasiblePolicy::kAbort;

  std::size_t n_followers() const { return followers.size(); }
  std::size_t n_leaders() const { return leader_x0.size(); }
  Eigen::Index state_dim() const { return leader.S.rows(); }
};

/// Pushes the scenario-level attack timing into every signal.
inline void apply_attack_timing(ScenarioConfig& cfg) {
  for (auto& f : cfg.followers) {
    for (ExpSignal* s : {&f.attack.cil, &f.attack.ol}) {
      s->start = cfg.attack_start;
      s->absolute_clock = cfg.absolute_clock;
    }
  }
}

inline void scale_attacks(ScenarioConfig& cfg, double factor) {
  for (auto& f : cfg.followers) {
    f.attack.cil.coeff *= factor;
    f.attack.ol.coeff *= factor;
  }
}

struct ValidationIssue {
  std::string field;
  std::string message;
};

/// Every violated precondition, not just the first.
inline std::vector<ValidationIssue> validate_scenario(const ScenarioConfig& cfg) {
  std::vector<ValidationIssue> issues;
  auto add = [&](std::string field, std::string msg) {
    issues.push_back({std::move(field), std::move(msg)});
  };
  auto positive = [&](const std::string& field, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) add(field, "must be a finite positive number");
  };

  const Eigen::Index n = cfg.leader.S.rows();
  bool leader_ok = n > 0 && cfg.leader.S.cols() == n;
  if (!leader_ok) {
    add("leader.S", "must be a non-empty square matrix");
  } else if (const auto chk = check_leader_assumption(cfg.leader); !chk.passed) {
    add("leader.S", "leader spectrum condition violated: " + chk.reason);
  }

  const std::size_t nf = cfg.followers.size();
  const std::size_t nl = cfg.leader_x0.size();
  if (nf == 0) add("followers", "at least one follower is required");
  if (nl == 0) add("leaders", "at least one leader is required");
  for (std::size_t r = 0; r < nl; ++r) {
    if (leader_ok && cfg.leader_x0[r].size() != n)
      add("leaders[" + std::to_string(r) + "].x0",
          "leader " + std::to_string(r + 1) + ": x0 must have " + std::to_string(n) + " entries");
  }

  std::vector<bool> follower_ok(nf, true);
  for (std::size_t i = 0; i < nf; ++i) {
    const auto& f = cfg.followers[i];
    const std::string base = "followers[" + std::to_string(i) + "]";
    const std::string who = "follower " + std::to_string(i + 1) + ": ";
    auto bad = [&](const std::string& key, const std::string& msg) {
      add(base + "." + key, who + msg);
      follower_ok[i] = false;
    };
    const auto& m = f.model;
    const Eigen::Index mi = m.B.cols();
    if (leader_ok && (m.A.rows() != n || m.A.cols() != n)) bad("A", "A must be " + std::to_string(n) + "x" + std::to_string(n));
    if (leader_ok && m.B.rows() != n) bad("B", "B must have " + std::to_string(n) + " rows");
    if (mi == 0) bad("B", "B must have at least one column");
    if (m.Q.rows() != m.A.rows() || m.Q.cols() != m.A.rows()) {
      bad("Q", "Q has the wrong shape");
    } else {
      if (!linalg::is_symmetric(m.Q)) bad("Q", "Q is not symmetric");
      if (!linalg::is_positive_definite(m.Q)) bad("Q", "Q is not positive definite");
    }
    if (m.U.rows() != mi || m.U.cols() != mi) {
      bad("U", "U has the wrong shape");
    } else {
      if (!linalg::is_symmetric(m.U)) bad("U", "U is not symmetric");
      if (!linalg::is_positive_definite(m.U)) bad("U", "U is not positive definite");
    }
    if (follower_ok[i] && !linalg::is_controllable(m.A, m.B))
      bad("B", "(A, B) is not controllable");
    if (leader_ok && f.x0.size() != n) bad("x0", "x0 must have " + std::to_string(n) + " entries");
    if (f.zeta0 && leader_ok && f.zeta0->size() != n) bad("zeta0", "zeta0 must have " + std::to_string(n) + " entries");
    if (f.attack.cil.coeff.size() != mi || f.attack.cil.rate.size() != mi)
      bad("attack.cil", "needs one {coeff, rate} pair per input");
    if (leader_ok && (f.attack.ol.coeff.size() != n || f.attack.ol.rate.size() != n))
      bad("attack.ol", "needs one {coeff, rate} pair per state");
    for (const ExpSignal* s : {&f.attack.cil, &f.attack.ol}) {
      if (!s->coeff.allFinite() || !s->rate.allFinite()) bad("attack", "coefficients and rates must be finite");
    }
    positive(base + ".q", f.q);
    positive(base + ".alpha", f.alpha);
    positive(base + ".c", f.c);
    if (!std::isfinite(f.theta0)) bad("theta0", "must be finite");
    if (!std::isfinite(f.rho0)) bad("rho0", "must be finite");
    if (f.bounds) {
      if (f.bounds->lower.size() != mi || f.bounds->upper.size() != mi) {
        bad("input_bounds", "lower/upper need one entry per input");
      } else if ((f.bounds->lower.array() > f.bounds->upper.array()).any()) {
        bad("input_bounds", "lower must not exceed upper");
      }
    }
    if (follower_ok[i] && leader_ok) {
      try {
        (void)synthesize_gains(m, cfg.leader);
      } catch (const Error& e) {
        bad("gains", e.what());
      }
    }
  }

  const auto& topo = cfg.topology;
  bool topo_ok = true;
  if (static_cast<std::size_t>(topo.adjacency.rows()) != nf) {
    add("topology.adjacency", "must be " + std::to_string(nf) + "x" + std::to_string(nf));
    topo_ok = false;
  }
  if (static_cast<std::size_t>(topo.pinning.rows()) != nf ||
      static_cast<std::size_t>(topo.pinning.cols()) != nl) {
    add("topology.pinning", "must be " + std::to_string(nf) + "x" + std::to_string(nl) +
                                " (followers x leaders)");
    topo_ok = false;
  }
  if (topo_ok) {
    for (auto& msg : topology_violations(topo)) add("topology", msg);
    if (const auto lost = check_reachability(topo); !lost.empty()) {
      std::string msg = "follower reachability violated: no directed path from any leader to follower(s)";
      for (const auto i : lost) msg += " " + std::to_string(i + 1);
      add("topology", msg);
    }
  }

  positive("safety.d_s", cfg.d_s);
  if (static_cast<std::size_t>(cfg.delta.rows()) != nf ||
      static_cast<std::size_t>(cfg.delta.cols()) != nf) {
    add("safety.delta", "must be " + std::to_string(nf) + "x" + std::to_string(nf));
  } else {
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t j = i + 1; j < nf; ++j)
        positive("safety.delta(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")",
                 cfg.delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
  }

  positive("simulation.dt", cfg.dt);
  positive("simulation.horizon", cfg.horizon);
  if (cfg.output_stride < 1) add("simulation.output_stride", "must be at least 1");
  positive("simulation.theta_cap", cfg.theta_cap);
  positive("simulation.rho_cap", cfg.rho_cap);
  positive("simulation.divergence_threshold", cfg.divergence_threshold);
  if (!(cfg.attack_start >= 0.0)) add("attack_start", "must be nonnegative");
  return issues;
}

/// Four heterogeneous 3-state followers and four leaders sharing the
/// skew-symmetric generator S, with fixed plant matrices and attack
/// tables. Topology and initial positions are local choices (see README).
inline ScenarioConfig reference_scenario() {
  auto mat = [](std::initializer_list<std::initializer_list<double>> rows) {
    Matrix m(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : rows) {
      Eigen::Index j = 0;
      for (const double v : r) m(i, j++) = v;
      ++i;
    }
    return m;
  };
  auto vec = [](std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double x : v) out(i++) = x;
    return out;
  };
  auto sig = [&](std::initializer_list<double> c, std::initializer_list<double> k) {
    return ExpSignal{vec(c), vec(k), 0.0, false};
  };

  ScenarioConfig cfg;
  cfg.name = "paper_sec4";
  cfg.leader.S = mat({{0, -2, 1}, {2, 0, 1}, {-1, -1, 0}});

  const Matrix eye = Matrix::Identity(3, 3);
  const std::vector<Matrix> a = {
      mat({{-2, 1, 0}, {0, -3, 1}, {0.5, 0, -1}}),
      mat({{-1, 0, 0.5}, {0, -2, 1}, {0.5, 0, -0.5}}),
      mat({{-1, 1, 0}, {0, -3, 1}, {0, 0.5, -1}}),
      mat({{-1, 0.5, 0}, {0.5, -1.5, 0.5}, {-0.5, 0, -2}}),
  };
  const std::vector<Matrix> b = {
      eye, mat({{0.5, 1, 0}, {1, 0.5, 0}, {0, 0, 1}}), eye, eye};
  const std::vector<AttackProfile> attacks = {
      {sig({2.5, 1.5, -6.6}, {0.07, 0.04, 0.08}), sig({-1.2, 1.5, 2.7}, {0.10, 0.17, 0.15})},
      {sig({2.3, -4.7, 11.5}, {0.05, 0.05, 0.04}), sig({3.3, -2.2, -1.7}, {0.06, 0.15, 0.12})},
      {sig({3.6, -4.7, -10.2}, {0.10, 0.09, 0.06}), sig({2.8, -5.0, -1.8}, {0.14, 0.04, 0.08})},
      {sig({-2.9, 5.2, -7.7}, {0.09, 0.06, 0.07}), sig({-5.2, 2.4, -2.1}, {0.04, 0.13, 0.14})},
  };

  // Regular tetrahedron of circumradius 1; followers start at −1.8× the
  // matching vertex, outside the hull and ≥ 2·d_s apart.
  const double s = 1.0 / std::sqrt(3.0);
  cfg.leader_x0 = {vec({s, s, s}), vec({s, -s, -s}), vec({-s, s, -s}), vec({-s, -s, s})};

  for (std::size_t i = 0; i < 4; ++i) {
    FollowerConfig f;
    f.model = {a[i], b[i], 3.0 * eye, eye};
    f.attack = attacks[i];
    f.x0 = -1.8 * cfg.leader_x0[i];
    cfg.followers.push_back(std::move(f));
  }

  // Chain 1 → 2 → 3 → 4 plus 1 → 4; follower i is pinned to leader i.
  cfg.topology.adjacency = Matrix::Zero(4, 4);
  cfg.topology.adjacency(1, 0) = 1.0;
  cfg.topology.adjacency(2, 1) = 1.0;
  cfg.topology.adjacency(3, 2) = 1.0;
  cfg.topology.adjacency(3, 0) = 1.0;
  cfg.topology.pinning = Matrix::Identity(4, 4);

  cfg.d_s = 0.3;
  cfg.delta = Matrix::Constant(4, 4, 5.0);
  cfg.attack_start = 3.0;
  apply_attack_timing(cfg);
  return cfg;
}

}  // namespace saar
