#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <variant>
#include <vector>

#include "saar/common.hpp"

namespace saar::qp {

/// Result of  min ½‖u − target‖²  s.t.  rows·u ≤ rhs.
struct Solution {
  Vector u;
  Vector multipliers;               // one per row, zero when inactive
  std::vector<Eigen::Index> active;  // rows in the final working set
  int iterations = 0;
};

/// Returned when the working set cannot be extended: the rows listed in
/// `conflicting` (working set plus the violated row) admit no common point.
struct Infeasible {
  std::vector<Eigen::Index> conflicting;
};

/// Stationarity, primal feasibility, dual feasibility and complementarity of
/// a candidate (u, λ), as a single max-norm.
inline double kkt_residual(const Vector& target, const Matrix& rows,
                           const Vector& rhs, const Vector& u,
                           const Vector& lambda) {
  double r = 0.0;
  Vector stat = u - target;
  if (rows.rows() > 0) stat += rows.transpose() * lambda;
  r = std::max(r, stat.cwiseAbs().maxCoeff());
  for (Eigen::Index k = 0; k < rows.rows(); ++k) {
    const double slack = rows.row(k).dot(u) - rhs(k);
    r = std::max(r, std::max(slack, 0.0));
    r = std::max(r, std::max(-lambda(k), 0.0));
    r = std::max(r, std::abs(lambda(k) * slack));
  }
  return r;
}

/// Dual active-set method (Goldfarb–Idnani with identity Hessian). Starts at
/// the unconstrained minimiser and adds the most violated row until all rows
/// hold; dropping rows whose multiplier would turn negative. Exact for the
/// handful of rows a safety filter produces.
inline std::variant<Solution, Infeasible> solve(const Vector& target,
                                                const Matrix& rows,
                                                const Vector& rhs) {
  const Eigen::Index m = target.size();
  const Eigen::Index k_rows = rows.rows();
  Solution sol;
  sol.u = target;
  sol.multipliers = Vector::Zero(k_rows);
  std::vector<Eigen::Index>& act = sol.active;
  std::vector<double> lam;  // multipliers of `act`

  const double scale = 1.0 + target.cwiseAbs().maxCoeff();
  auto row_tol = [&](Eigen::Index k) {
    return 1e-13 * (1.0 + std::abs(rhs(k)) + rows.row(k).norm() * scale);
  };

  const int max_iter = static_cast<int>(10 * (k_rows + m) + 10);
  for (int iter = 0; iter < max_iter; ++iter) {
    sol.iterations = iter;
    // Most violated row, normalised by its norm.
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index k = 0; k < k_rows; ++k) {
      if (std::find(act.begin(), act.end(), k) != act.end()) continue;
      const double viol = rows.row(k).dot(sol.u) - rhs(k);
      if (viol <= row_tol(k)) continue;
      const double nrm = rows.row(k).norm();
      const double w = nrm > 0.0 ? viol / nrm : std::numeric_limits<double>::infinity();
      if (w > worst) {
        worst = w;
        p = k;
      }
    }
    if (p < 0) break;

    const Vector np = rows.row(p).transpose();
    double lam_p = 0.0;
    for (;;) {
      // Working-set normals as columns.
      Matrix n_act(m, static_cast<Eigen::Index>(act.size()));
      for (std::size_t a = 0; a < act.size(); ++a)
        n_act.col(static_cast<Eigen::Index>(a)) = rows.row(act[a]).transpose();
      Vector r = Vector::Zero(static_cast<Eigen::Index>(act.size()));
      Vector z = np;
      if (!act.empty()) {
        r = n_act.colPivHouseholderQr().solve(np);
        z = np - n_act * r;
      }
      // Moving u along −z decreases row p; multipliers move by t·(1, −r).
      const double zn = z.dot(np);
      const double viol = np.dot(sol.u) - rhs(p);
      double t_full = std::numeric_limits<double>::infinity();
      if (z.norm() > 1e-12 * np.norm() && zn > 0.0) t_full = viol / zn;

      double t_part = std::numeric_limits<double>::infinity();
      std::size_t drop = 0;
      for (std::size_t a = 0; a < act.size(); ++a) {
        const double ra = r(static_cast<Eigen::Index>(a));
        if (ra > 0.0) {
          const double cand = lam[a] / ra;
          if (cand < t_part) {
            t_part = cand;
            drop = a;
          }
        }
      }

      const double step = std::min(t_full, t_part);
      if (!std::isfinite(step)) {
        Infeasible inf;
        inf.conflicting = act;
        inf.conflicting.push_back(p);
        std::sort(inf.conflicting.begin(), inf.conflicting.end());
        return inf;
      }
      if (std::isfinite(t_full)) sol.u -= step * z;
      for (std::size_t a = 0; a < act.size(); ++a)
        lam[a] -= step * r(static_cast<Eigen::Index>(a));
      lam_p += step;

      if (step == t_full) {
        act.push_back(p);
        lam.push_back(lam_p);
        break;
      }
      act.erase(act.begin() + static_cast<std::ptrdiff_t>(drop));
      lam.erase(lam.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
  for (Eigen::Index k = 0; k < k_rows; ++k) {
    if (rows.row(k).dot(sol.u) - rhs(k) > 1e3 * row_tol(k)) {
      return Infeasible{{k}};  // iteration cap hit; should not happen
    }
  }
  for (std::size_t a = 0; a < act.size(); ++a)
    sol.multipliers(act[a]) = std::max(lam[a], 0.0);

  // Refinement: re-solve the equality system of the final working set in one
  // shot. Accumulated step updates leave O(1e-12) slack on nearly dependent
  // rows, which matters once multipliers are large.
  if (!act.empty()) {
    const auto na = static_cast<Eigen::Index>(act.size());
    Matrix n_act(na, m);
    Vector b_act(na);
    for (Eigen::Index a = 0; a < na; ++a) {
      n_act.row(a) = rows.row(act[static_cast<std::size_t>(a)]);
      b_act(a) = rhs(act[static_cast<std::size_t>(a)]);
    }
    // Nᵀ = QR: u = (I − QQᵀ)target + Q R⁻ᵀb, λ = R⁻¹(Qᵀtarget − R⁻ᵀb).
    const Eigen::HouseholderQR<Matrix> qr(n_act.transpose());
    const Matrix q = qr.householderQ() * Matrix::Identity(m, na);
    const auto r = qr.matrixQR().topRows(na).template triangularView<Eigen::Upper>();
    const Vector z = r.transpose().solve(b_act);
    const Vector qt = q.transpose() * target;
    const Vector lam_ref = r.solve(qt - z);
    if (lam_ref.allFinite() && lam_ref.minCoeff() >= 0.0) {
      Solution ref = sol;
      ref.u = target - q * qt + q * z;
      ref.multipliers.setZero();
      for (Eigen::Index a = 0; a < na; ++a) ref.multipliers(act[static_cast<std::size_t>(a)]) = lam_ref(a);
      if (kkt_residual(target, rows, rhs, ref.u, ref.multipliers) <
          kkt_residual(target, rows, rhs, sol.u, sol.multipliers))
        return ref;
    }
  }
  return sol;
}

}  // namespace saar::qp
