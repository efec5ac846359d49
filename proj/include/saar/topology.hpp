#pragma once

#include <cstddef>
#include <deque>
#include <sstream>
#include <string>
#include <vector>

#include "saar/common.hpp"
#include "saar/linalg.hpp"

namespace saar {

/// Time-invariant communication digraph of N followers and M leaders.
///
/// `adjacency(i, j)` is follower i's weight on follower j (information flows
/// from j to i). `pinning(i, r)` is follower i's gain on leader r, i.e. the
/// diagonal of the r-th pinning matrix G_r.
struct Topology {
  Matrix adjacency;  // N x N, zero diagonal
  Matrix pinning;    // N x M

  std::size_t n_followers() const {
    return static_cast<std::size_t>(adjacency.rows());
  }
  std::size_t n_leaders() const {
    return static_cast<std::size_t>(pinning.cols());
  }
  Matrix pinning_matrix(std::size_t r) const {
    return pinning.col(static_cast<Eigen::Index>(r)).asDiagonal();
  }
};

/// Φ_r = L/M + G_r for every leader, plus their sum and the follower
/// Laplacian L = D_in − A.
struct PhiFamily {
  std::vector<Matrix> phi;
  Matrix phi_sum;
  Matrix laplacian;
};

/// Structural invariants: shapes, zero diagonal, nonnegative weights.
/// Returns human-readable violations (empty when the topology is well formed).
inline std::vector<std::string> topology_violations(const Topology& topo) {
  std::vector<std::string> out;
  const auto n = topo.adjacency.rows();
  if (n == 0) out.emplace_back("topology: at least one follower is required");
  if (topo.adjacency.cols() != n)
    out.emplace_back("topology.adjacency: must be square");
  if (topo.pinning.rows() != n)
    out.emplace_back("topology.pinning: needs one row per follower");
  if (topo.pinning.cols() == 0)
    out.emplace_back("topology.pinning: at least one leader is required");
  if (!out.empty()) return out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (topo.adjacency(i, i) != 0.0) {
      out.push_back("topology.adjacency: diagonal entry of follower " +
                    std::to_string(i + 1) + " must be zero");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!(topo.adjacency(i, j) >= 0.0)) {
        out.push_back("topology.adjacency: entry (" + std::to_string(i + 1) +
                      "," + std::to_string(j + 1) + ") must be nonnegative");
      }
    }
    for (Eigen::Index r = 0; r < topo.pinning.cols(); ++r) {
      if (!(topo.pinning(i, r) >= 0.0)) {
        out.push_back("topology.pinning: entry (" + std::to_string(i + 1) +
                      "," + std::to_string(r + 1) + ") must be nonnegative");
      }
    }
  }
  return out;
}

/// Followers without a directed path from any leader (zero-based, sorted).
/// Traversal starts at pinned followers and follows information flow: once
/// follower j is reached, every follower i with a_ij > 0 is reached too.
inline std::vector<std::size_t> check_reachability(const Topology& topo) {
  const auto n = static_cast<Eigen::Index>(topo.n_followers());
  std::vector<bool> reached(static_cast<std::size_t>(n), false);
  std::deque<Eigen::Index> frontier;
  for (Eigen::Index i = 0; i < n; ++i) {
    if ((topo.pinning.row(i).array() > 0.0).any()) {
      reached[static_cast<std::size_t>(i)] = true;
      frontier.push_back(i);
    }
  }
  while (!frontier.empty()) {
    const Eigen::Index j = frontier.front();
    frontier.pop_front();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!reached[static_cast<std::size_t>(i)] && topo.adjacency(i, j) > 0.0) {
        reached[static_cast<std::size_t>(i)] = true;
        frontier.push_back(i);
      }
    }
  }
  std::vector<std::size_t> unreachable;
  for (std::size_t i = 0; i < reached.size(); ++i) {
    if (!reached[i]) unreachable.push_back(i);
  }
  return unreachable;
}

inline Matrix laplacian(const Matrix& adjacency) {
  Matrix l = -adjacency;
  l.diagonal() = adjacency.rowwise().sum();
  return l;
}

inline PhiFamily build_phi_family(const Topology& topo) {
  if (const auto bad = topology_violations(topo); !bad.empty()) {
    throw AssumptionError(bad.front());
  }
  if (const auto lost = check_reachability(topo); !lost.empty()) {
    std::ostringstream msg;
    msg << "follower reachability violated: no directed path from any leader "
           "to follower";
    msg << (lost.size() > 1 ? "s" : "");
    for (std::size_t k = 0; k < lost.size(); ++k) {
      msg << (k == 0 ? " " : ", ") << lost[k] + 1;
    }
    throw AssumptionError(msg.str());
  }

  PhiFamily fam;
  fam.laplacian = laplacian(topo.adjacency);
  const auto m = static_cast<double>(topo.n_leaders());
  fam.phi_sum = Matrix::Zero(fam.laplacian.rows(), fam.laplacian.cols());
  for (std::size_t r = 0; r < topo.n_leaders(); ++r) {
    fam.phi.push_back(fam.laplacian / m + topo.pinning_matrix(r));
    fam.phi_sum += fam.phi.back();
  }
  if (linalg::min_singular_value(fam.phi_sum) <= 1e-12) {
    throw AssumptionError("sum of Phi matrices is singular");
  }
  return fam;
}

}  // namespace saar
