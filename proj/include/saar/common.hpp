#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace saar {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A modelling precondition (graph reachability, controllability, leader
/// spectrum, weight definiteness) does not hold.
class AssumptionError : public Error {
 public:
  using Error::Error;
};

/// A numerical solver failed to meet its residual contract.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Follower pair (i, j), zero-based, i < j.
struct AgentPair {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const AgentPair&, const AgentPair&) = default;
};

/// The safety QP of one agent has an empty feasible set.
class InfeasibleQpError : public Error {
 public:
  InfeasibleQpError(const std::string& what, std::size_t agent,
                    std::vector<AgentPair> conflicting, double time = 0.0)
      : Error(what),
        agent_(agent),
        conflicting_(std::move(conflicting)),
        time_(time) {}

  std::size_t agent() const { return agent_; }
  const std::vector<AgentPair>& conflicting_pairs() const {
    return conflicting_;
  }
  double time() const { return time_; }

 private:
  std::size_t agent_;
  std::vector<AgentPair> conflicting_;
  double time_;
};

/// Non-finite values appeared in the integrated state.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time)
      : Error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace saar
