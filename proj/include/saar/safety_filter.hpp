#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <sstream>
#include <variant>
#include <vector>

#include "saar/common.hpp"
#include "saar/gain_synthesis.hpp"
#include "saar/qp.hpp"

namespace saar {

/// h = d_s² − ‖x_i − x_j‖². The pair is safe while h ≤ 0.
inline double cbf_value(const Vector& x_i, const Vector& x_j, double d_s) {
  return d_s * d_s - (x_i - x_j).squaredNorm();
}

/// ḣ = −2(x_i − x_j)ᵀ(ẋ_i − ẋ_j).
inline double cbf_rate(const Vector& x_i, const Vector& x_j,
                       const Vector& xdot_i, const Vector& xdot_j) {
  return -2.0 * (x_i - x_j).dot(xdot_i - xdot_j);
}

/// Affine collision-avoidance row aᵀu_i ≤ b for pair (i, j), j > i, with u_j
/// already fixed. Equivalent to ḣ ≤ −δh along ẋ = A x + B u.
struct PairConstraint {
  AgentPair pair;
  Vector a;
  double b = 0.0;
  double delta = 0.0;
  double h = 0.0;
};

inline PairConstraint build_constraint(std::size_t i, std::size_t j,
                                       std::span<const Vector> states,
                                       std::span<const AgentModel> models,
                                       const Vector& u_j, double delta,
                                       double d_s) {
  const Vector d = states[i] - states[j];
  const AgentModel& mi = models[i];
  const AgentModel& mj = models[j];
  PairConstraint c;
  c.pair = {i, j};
  c.delta = delta;
  c.h = cbf_value(states[i], states[j], d_s);
  c.a = -2.0 * mi.B.transpose() * d;  // L_g h
  const double lf_h = -2.0 * d.dot(mi.A * states[i]);
  c.b = -delta * c.h - 2.0 * d.dot(mj.A * states[j]) -
        2.0 * d.dot(mj.B * u_j) - lf_h;
  return c;
}

/// Optional element-wise box on an agent's input; enters the QP as rows.
struct InputBounds {
  Vector lower;
  Vector upper;
};

struct FilterResult {
  Vector u;
  Vector delta_u;                    // u − ū
  std::vector<AgentPair> active_set;  // pair rows holding with equality
  std::vector<PairConstraint> constraints;
  Vector multipliers;  // per pair row
  double kkt_residual = 0.0;
  bool infeasible = false;
};

namespace detail {

inline void stack_rows(std::span<const PairConstraint> constraints,
                       const std::optional<InputBounds>& bounds,
                       Eigen::Index m, Matrix& rows, Vector& rhs) {
  const auto n_pair = static_cast<Eigen::Index>(constraints.size());
  const Eigen::Index n_box = bounds ? 2 * m : 0;
  rows.resize(n_pair + n_box, m);
  rhs.resize(n_pair + n_box);
  for (Eigen::Index k = 0; k < n_pair; ++k) {
    rows.row(k) = constraints[static_cast<std::size_t>(k)].a.transpose();
    rhs(k) = constraints[static_cast<std::size_t>(k)].b;
  }
  for (Eigen::Index k = 0; k < n_box / 2; ++k) {
    rows.row(n_pair + 2 * k) = Vector::Unit(m, k).transpose();
    rhs(n_pair + 2 * k) = bounds->upper(k);
    rows.row(n_pair + 2 * k + 1) = -Vector::Unit(m, k).transpose();
    rhs(n_pair + 2 * k + 1) = -bounds->lower(k);
  }
}

}  // namespace detail

/// min ‖u − ū‖² subject to every pair row (and the optional box).
/// Throws InfeasibleQpError naming the conflicting pairs.
inline FilterResult solve_agent_qp(std::size_t agent, const Vector& u_bar,
                                   std::span<const PairConstraint> constraints,
                                   const std::optional<InputBounds>& bounds = {}) {
  const Eigen::Index m = u_bar.size();
  Matrix rows;
  Vector rhs;
  detail::stack_rows(constraints, bounds, m, rows, rhs);

  FilterResult out;
  out.constraints.assign(constraints.begin(), constraints.end());
  auto result = qp::solve(u_bar, rows, rhs);
  if (auto* inf = std::get_if<qp::Infeasible>(&result)) {
    std::vector<AgentPair> pairs;
    std::ostringstream msg;
    msg << "safety QP of follower " << agent + 1 << " is infeasible; conflicting rows:";
    for (const auto k : inf->conflicting) {
      if (k < static_cast<Eigen::Index>(constraints.size())) {
        const AgentPair p = constraints[static_cast<std::size_t>(k)].pair;
        pairs.push_back(p);
        msg << " (" << p.i + 1 << "," << p.j + 1 << ")";
      } else {
        msg << " input-bound";
      }
    }
    throw InfeasibleQpError(msg.str(), agent, std::move(pairs));
  }
  auto& sol = std::get<qp::Solution>(result);
  out.u = sol.u;
  out.delta_u = sol.u - u_bar;
  out.kkt_residual = qp::kkt_residual(u_bar, rows, rhs, sol.u, sol.multipliers);
  const auto n_pair = static_cast<Eigen::Index>(constraints.size());
  out.multipliers = sol.multipliers.head(n_pair);
  for (const auto k : sol.active) {
    if (k < n_pair) out.active_set.push_back(constraints[static_cast<std::size_t>(k)].pair);
  }
  std::sort(out.active_set.begin(), out.active_set.end(),
            [](const AgentPair& l, const AgentPair& r) { return l.j < r.j; });
  return out;
}

enum class InfeasiblePolicy {
  kAbort,        // throw InfeasibleQpError
  kPassThrough,  // keep ū for that agent and flag the result
};

struct FilterParams {
  double d_s = 0.3;
  Matrix delta;  // N x N, entry (i, j) with i < j used
  std::vector<std::optional<InputBounds>> bounds;  // empty or one per agent
  InfeasiblePolicy policy = InfeasiblePolicy::kAbort;
};

struct SequentialResult {
  std::vector<FilterResult> agents;
  std::vector<AgentPair> evaluation_order;
  std::size_t infeasible_count = 0;
};

/// Backward-constrained pairwise scheme: the last agent keeps ū; agents
/// N−1, …, 1 each solve their QP against every higher-indexed agent whose
/// input has already been finalised.
inline SequentialResult sequential_filter(std::span<const Vector> u_bars,
                                          std::span<const Vector> states,
                                          std::span<const AgentModel> models,
                                          const FilterParams& params) {
  const std::size_t n = u_bars.size();
  SequentialResult out;
  out.agents.resize(n);
  auto bounds_of = [&](std::size_t i) -> std::optional<InputBounds> {
    return params.bounds.empty() ? std::nullopt : params.bounds[i];
  };
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = n - 1 - step;
    std::vector<PairConstraint> rows;
    for (std::size_t j = i + 1; j < n; ++j) {
      rows.push_back(build_constraint(
          i, j, states, models, out.agents[j].u,
          params.delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)),
          params.d_s));
      out.evaluation_order.push_back({i, j});
    }
    try {
      out.agents[i] = solve_agent_qp(i, u_bars[i], rows, bounds_of(i));
    } catch (const InfeasibleQpError&) {
      if (params.policy == InfeasiblePolicy::kAbort) throw;
      FilterResult& r = out.agents[i];
      r.u = u_bars[i];
      r.delta_u = Vector::Zero(u_bars[i].size());
      r.constraints = std::move(rows);
      r.multipliers = Vector::Zero(static_cast<Eigen::Index>(r.constraints.size()));
      r.infeasible = true;
      ++out.infeasible_count;
    }
  }
  return out;
}

}  // namespace saar
