#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "saar/simulator.hpp"

namespace saar {

/// Shortest decimal text that round-trips a double (17 significant digits).
inline std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// CSV header. Layout:
///   t, ec_norm,
///   per follower i (1-based): fi_x*, fi_zeta*, fi_xi*, fi_eps*, fi_ec*, fi_delta_o*,
///     fi_theta, fi_rho, fi_gamma_a*, fi_gamma_ol*, fi_u_c*, fi_gamma_hat*, fi_u_r*,
///     fi_u_bar*, fi_u*, fi_delta_u*, fi_infeasible,
///   per leader r: lr_x*,
///   per pair (i, j), i < j lexicographic: pi_j_d, pi_j_h, pi_j_active.
/// Vector components are suffixed 0, 1, ...
inline std::vector<std::string> trace_columns(std::size_t n_followers, std::size_t n_leaders,
                                              Eigen::Index n, Eigen::Index m) {
  std::vector<std::string> cols{"t", "ec_norm"};
  auto block = [&](const std::string& prefix, Eigen::Index dim) {
    for (Eigen::Index k = 0; k < dim; ++k) cols.push_back(prefix + std::to_string(k));
  };
  for (std::size_t i = 1; i <= n_followers; ++i) {
    const std::string f = "f" + std::to_string(i) + "_";
    for (const char* s : {"x", "zeta", "xi", "eps", "ec", "delta_o"}) block(f + s, n);
    cols.push_back(f + "theta");
    cols.push_back(f + "rho");
    block(f + "gamma_a", m);
    block(f + "gamma_ol", n);
    for (const char* s : {"u_c", "gamma_hat", "u_r", "u_bar", "u", "delta_u"}) block(f + s, m);
    cols.push_back(f + "infeasible");
  }
  for (std::size_t r = 1; r <= n_leaders; ++r) block("l" + std::to_string(r) + "_x", n);
  for (std::size_t i = 1; i <= n_followers; ++i)
    for (std::size_t j = i + 1; j <= n_followers; ++j) {
      const std::string p = "p" + std::to_string(i) + "_" + std::to_string(j) + "_";
      cols.push_back(p + "d");
      cols.push_back(p + "h");
      cols.push_back(p + "active");
    }
  return cols;
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace,
                            const ScenarioConfig& cfg) {
  const Eigen::Index n = cfg.state_dim();
  const Eigen::Index m = cfg.followers.empty() ? 0 : cfg.followers[0].model.input_dim();
  const auto cols = trace_columns(cfg.n_followers(), cfg.n_leaders(), n, m);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';

  std::string line;
  auto put = [&](double v) {
    line += ',';
    line += fmt17(v);
  };
  auto put_vec = [&](const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) put(v(k));
  };
  for (const auto& rec : trace) {
    line = fmt17(rec.t);
    put(rec.e_c.norm());
    for (std::size_t i = 0; i < rec.agents.size(); ++i) {
      const AgentTrace& a = rec.agents[i];
      const auto off = static_cast<Eigen::Index>(i) * n;
      put_vec(a.x);
      put_vec(a.zeta);
      put_vec(a.xi);
      put_vec(a.eps);
      put_vec(rec.e_c.segment(off, n));
      put_vec(rec.delta_o.segment(off, n));
      put(a.theta);
      put(a.rho_hat);
      put_vec(a.gamma_a);
      put_vec(a.gamma_ol);
      put_vec(a.u_c);
      put_vec(a.gamma_hat);
      put_vec(a.u_r);
      put_vec(a.u_bar);
      put_vec(a.u);
      put_vec(a.delta_u);
      line += a.infeasible ? ",1" : ",0";
    }
    for (const auto& x : rec.leader_x) put_vec(x);
    for (std::size_t k = 0; k < rec.pairs.size(); ++k) {
      put(rec.distance[k]);
      put(rec.h[k]);
      line += rec.active[k] ? ",1" : ",0";
    }
    out << line << '\n';
  }
}

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::kCompleted: return "completed";
    case Termination::kInfeasibleQp: return "infeasible_qp";
    case Termination::kNonFinite: return "non_finite";
  }
  return "unknown";
}

inline nlohmann::json summary_to_json(const Summary& s, const std::string& scenario_name = {}) {
  nlohmann::json j;
  if (!scenario_name.empty()) j["scenario"] = scenario_name;
  j["mode"] = to_string(s.mode);
  j["horizon"] = s.horizon;
  j["dt"] = s.dt;
  j["steps"] = s.steps;
  j["final_time"] = s.final_time;
  j["termination"] = to_string(s.termination);
  if (!s.message.empty()) j["message"] = s.message;
  j["max_ec"] = s.max_ec;
  j["max_ec_tail"] = s.max_ec_tail;
  j["tail_start"] = s.tail_start;
  if (std::isfinite(s.min_pair_distance)) {
    j["min_pair_distance"] = s.min_pair_distance;
    j["min_pair_distance_time"] = s.min_pair_distance_time;
  } else {
    j["min_pair_distance"] = nullptr;
    j["min_pair_distance_time"] = nullptr;
  }
  j["first_divergence_time"] =
      s.first_divergence_time ? nlohmann::json(*s.first_divergence_time) : nlohmann::json(nullptr);
  j["final_theta"] = s.final_theta;
  j["final_rho"] = s.final_rho;
  j["qp_infeasible_count"] = s.qp_infeasible_count;
  j["max_delta_u"] = s.max_delta_u;
  j["clamp_events"] = s.clamp_events;
  j["wall_clock_seconds"] = s.wall_clock_seconds;
  return j;
}

}  // namespace saar
