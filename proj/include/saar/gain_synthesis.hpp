#pragma once

#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

#include "saar/common.hpp"
#include "saar/linalg.hpp"

namespace saar {

/// Follower plant ẋ = A x + B u with LQ weights Q (state) and U (input).
struct AgentModel {
  Matrix A;
  Matrix B;
  Matrix Q;
  Matrix U;

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
};

/// Leader command generator ẋ_r = S x_r.
struct LeaderModel {
  Matrix S;
};

struct GainSet {
  Matrix P;   // stabilising Riccati solution
  Matrix K;   // feedback, −U⁻¹BᵀP
  Matrix H;   // feedforward, Π − K
  Matrix Pi;  // regulator solution, S = A + BΠ
  double care_residual = 0.0;
  double regulator_residual = 0.0;
};

inline constexpr double kRegulatorTolerance = 1e-10;
inline constexpr double kCareTolerance = 1e-8;

/// ‖AᵀP + PA + Q − PBU⁻¹BᵀP‖_F.
inline double care_residual(const AgentModel& model, const Matrix& p) {
  const Matrix bp = model.B.transpose() * p;
  const Matrix r = model.A.transpose() * p + p * model.A + model.Q -
                   bp.transpose() * model.U.llt().solve(bp);
  return r.norm();
}

inline double regulator_residual(const AgentModel& model,
                                 const LeaderModel& leader, const Matrix& pi) {
  return (leader.S - model.A - model.B * pi).norm();
}

/// Least-squares solution of S = A + BΠ; the residual must vanish.
inline Matrix solve_regulator(const AgentModel& model,
                              const LeaderModel& leader) {
  if (leader.S.rows() != model.A.rows() || leader.S.cols() != model.A.cols()) {
    throw Error("regulator equation: S and A must have the same shape");
  }
  const Matrix rhs = leader.S - model.A;
  const Matrix pi = model.B.completeOrthogonalDecomposition().solve(rhs);
  const double res = regulator_residual(model, leader, pi);
  if (!(res <= kRegulatorTolerance)) {
    std::ostringstream msg;
    msg << "regulator equation unsolvable for this (A,B,S): residual " << res;
    throw SolverError(msg.str(), res);
  }
  return pi;
}

namespace detail {

// Bass' construction: with β > ‖A‖ the matrix A + βI is anti-Hurwitz, the
// Lyapunov solution Z of (A+βI)Z + Z(A+βI)ᵀ = 2BBᵀ is positive definite for
// a controllable pair, and K = −BᵀZ⁻¹ makes A + BK Hurwitz.
inline Matrix bass_stabilising_gain(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  const double beta = a.norm() + 1.0;
  const Matrix shifted = a + beta * Matrix::Identity(n, n);
  const Matrix z = linalg::solve_lyapunov(shifted, 2.0 * b * b.transpose());
  return -b.transpose() * z.llt().solve(Matrix::Identity(n, n));
}

}  // namespace detail

struct CareOptions {
  int max_iterations = 100;
  double tolerance = kCareTolerance;
};

/// Stabilising solution of AᵀP + PA + Q − PBU⁻¹BᵀP = 0 by Newton–Kleinman
/// iteration started from a Bass stabilising gain.
inline Matrix solve_care(const AgentModel& model, CareOptions opts = {}) {
  const Eigen::Index n = model.state_dim();
  const Eigen::Index m = model.input_dim();
  if (model.A.cols() != n || model.B.rows() != n || model.Q.rows() != n ||
      model.Q.cols() != n || model.U.rows() != m || model.U.cols() != m) {
    throw Error("Riccati equation: inconsistent A/B/Q/U dimensions");
  }
  if (!linalg::is_symmetric(model.Q) || !linalg::is_positive_definite(model.Q))
    throw AssumptionError("Riccati equation: Q must be symmetric positive definite");
  if (!linalg::is_symmetric(model.U) || !linalg::is_positive_definite(model.U))
    throw AssumptionError("Riccati equation: U must be symmetric positive definite");
  if (!linalg::is_controllable(model.A, model.B))
    throw AssumptionError("Riccati equation: (A, B) is not controllable");

  const Eigen::LLT<Matrix> u_llt(model.U);
  Matrix k = detail::bass_stabilising_gain(model.A, model.B);
  Matrix p = Matrix::Zero(n, n);
  double best = std::numeric_limits<double>::infinity();
  Matrix best_p = p;
  int stalled = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    const Matrix closed = model.A + model.B * k;
    const Matrix weight = model.Q + k.transpose() * model.U * k;
    // closedᵀ P + P closed = −weight
    p = linalg::solve_lyapunov(closed.transpose(), -weight);
    k = -u_llt.solve(model.B.transpose() * p);
    const double res = care_residual(model, p);
    if (res < best) {
      best = res;
      best_p = p;
      stalled = 0;
    } else if (++stalled >= 3) {
      break;  // converged to machine precision
    }
    if (res <= 1e-3 * opts.tolerance) break;
  }
  if (!(best <= opts.tolerance)) {
    std::ostringstream msg;
    msg << "Riccati iteration did not converge: final residual " << best;
    throw SolverError(msg.str(), best);
  }
  return best_p;
}

inline GainSet synthesize_gains(const AgentModel& model,
                                const LeaderModel& leader) {
  GainSet g;
  g.Pi = solve_regulator(model, leader);
  g.P = solve_care(model);
  g.K = -model.U.llt().solve(model.B.transpose() * g.P);
  g.H = g.Pi - g.K;
  g.care_residual = care_residual(model, g.P);
  g.regulator_residual = regulator_residual(model, leader, g.Pi);
  return g;
}

struct LeaderCheck {
  bool passed = false;
  std::vector<std::complex<double>> eigenvalues;
  std::string reason;
};

/// S may have no eigenvalue with positive real part, and eigenvalues on the
/// imaginary axis must be simple.
inline LeaderCheck check_leader_assumption(const LeaderModel& leader,
                                           double axis_tol = 1e-9,
                                           double repeat_tol = 1e-6) {
  LeaderCheck out;
  if (leader.S.rows() != leader.S.cols() || leader.S.rows() == 0) {
    out.reason = "S must be a non-empty square matrix";
    return out;
  }
  out.eigenvalues = linalg::eigenvalues(leader.S);
  for (const auto& ev : out.eigenvalues) {
    if (ev.real() > axis_tol) {
      std::ostringstream msg;
      msg << "S has eigenvalue " << ev.real() << (ev.imag() < 0 ? "" : "+")
          << ev.imag() << "i with positive real part";
      out.reason = msg.str();
      return out;
    }
  }
  for (std::size_t a = 0; a < out.eigenvalues.size(); ++a) {
    if (std::abs(out.eigenvalues[a].real()) > axis_tol) continue;
    for (std::size_t b = a + 1; b < out.eigenvalues.size(); ++b) {
      if (std::abs(out.eigenvalues[b].real()) > axis_tol) continue;
      if (std::abs(out.eigenvalues[a] - out.eigenvalues[b]) <= repeat_tol) {
        std::ostringstream msg;
        msg << "S has a repeated eigenvalue " << out.eigenvalues[a].imag()
            << "i on the imaginary axis";
        out.reason = msg.str();
        return out;
      }
    }
  }
  out.passed = true;
  return out;
}

}  // namespace saar
