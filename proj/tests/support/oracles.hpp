#pragma once

// Reference computations used only by tests. Each one takes a different
// route from the library code it checks.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Monic characteristic polynomial coefficients, highest degree first,
/// by the Faddeev–LeVerrier recursion.
inline std::vector<double> char_poly(const Matrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<double> c(static_cast<std::size_t>(n + 1), 0.0);
  c[0] = 1.0;
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    m = a * m + c[static_cast<std::size_t>(k - 1)] * Matrix::Identity(n, n);
    c[static_cast<std::size_t>(k)] = -(a * m).trace() / static_cast<double>(k);
  }
  return c;
}

/// All roots of a monic polynomial (highest degree first), Durand–Kerner.
inline std::vector<Complex> poly_roots(const std::vector<double>& c) {
  const std::size_t n = c.size() - 1;
  std::vector<Complex> z(n);
  const Complex seed(0.4, 0.9);
  for (std::size_t k = 0; k < n; ++k) z[k] = std::pow(seed, static_cast<double>(k));
  auto eval = [&](Complex x) {
    Complex v = 0.0;
    for (double ck : c) v = v * x + ck;
    return v;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      Complex den = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (j != k) den *= (z[k] - z[j]);
      const Complex step = eval(z[k]) / den;
      z[k] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  // Newton polish against the original polynomial.
  for (auto& r : z) {
    for (int it = 0; it < 5; ++it) {
      Complex p = 0.0, dp = 0.0;
      for (double ck : c) {
        dp = dp * r + p;
        p = p * r + ck;
      }
      if (std::abs(dp) > 0.0) r -= p / dp;
    }
  }
  std::sort(z.begin(), z.end(), [](Complex l, Complex r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return z;
}

inline std::vector<Complex> eigenvalues(const Matrix& a) { return poly_roots(char_poly(a)); }

inline double max_real_part(const Matrix& a) {
  double r = -std::numeric_limits<double>::infinity();
  for (const auto& z : eigenvalues(a)) r = std::max(r, z.real());
  return r;
}

/// Stabilising CARE solution from the stable invariant subspace of the
/// Hamiltonian [A, −BU⁻¹Bᵀ; −Q, −Aᵀ].
inline Matrix care_hamiltonian(const Matrix& a, const Matrix& b, const Matrix& q, const Matrix& u) {
  const Eigen::Index n = a.rows();
  Matrix h(2 * n, 2 * n);
  h << a, -b * u.inverse() * b.transpose(), -q, -a.transpose();
  Eigen::EigenSolver<Matrix> es(h);
  Eigen::MatrixXcd basis(2 * n, n);
  Eigen::Index col = 0;
  for (Eigen::Index k = 0; k < 2 * n; ++k) {
    if (es.eigenvalues()(k).real() < 0.0 && col < n) basis.col(col++) = es.eigenvectors().col(k);
  }
  const Eigen::MatrixXcd x1 = basis.topRows(n), x2 = basis.bottomRows(n);
  const Eigen::MatrixXcd p = x2 * x1.inverse();
  const Matrix pr = p.real();
  return 0.5 * (pr + pr.transpose());
}

/// p > 0 root of 2ap − p²b²/u + q = 0.
inline double scalar_care(double a, double b, double q, double u) {
  return (2.0 * a + std::sqrt(4.0 * a * a + 4.0 * q * b * b / u)) * u / (2.0 * b * b);
}

inline Matrix kron(const Matrix& l, const Matrix& r) {
  Matrix out(l.rows() * r.rows(), l.cols() * r.cols());
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    for (Eigen::Index j = 0; j < l.cols(); ++j)
      out.block(i * r.rows(), j * r.cols(), r.rows(), r.cols()) = l(i, j) * r;
  return out;
}

/// Φ_r = L/M + diag(g_·r), assembled from scratch.
inline std::vector<Matrix> phi_matrices(const Matrix& adjacency, const Matrix& pinning) {
  const Eigen::Index n = adjacency.rows();
  Matrix lap = -adjacency;
  for (Eigen::Index i = 0; i < n; ++i) lap(i, i) = adjacency.row(i).sum() - adjacency(i, i);
  std::vector<Matrix> out;
  for (Eigen::Index r = 0; r < pinning.cols(); ++r) {
    Matrix g = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) g(i, i) = pinning(i, r);
    out.push_back(lap / static_cast<double>(pinning.cols()) + g);
  }
  return out;
}

/// Stacked z − (Σ_ν Φ_ν⊗I)⁻¹ Σ_r (Φ_r⊗I)(1⊗x_r), dense Kronecker assembly.
inline Vector containment_error(const std::vector<Vector>& z, const std::vector<Vector>& leaders,
                                const Matrix& adjacency, const Matrix& pinning) {
  const auto phi = phi_matrices(adjacency, pinning);
  const Eigen::Index nf = adjacency.rows(), n = z[0].size();
  const Matrix eye = Matrix::Identity(n, n);
  Matrix sum = Matrix::Zero(nf * n, nf * n);
  Vector rhs = Vector::Zero(nf * n);
  for (std::size_t r = 0; r < phi.size(); ++r) {
    const Matrix big = kron(phi[r], eye);
    sum += big;
    rhs += big * kron(Matrix::Ones(nf, 1), leaders[r]);
  }
  Vector stacked(nf * n);
  for (Eigen::Index i = 0; i < nf; ++i) stacked.segment(i * n, n) = z[static_cast<std::size_t>(i)];
  return stacked - sum.fullPivLu().solve(rhs);
}

/// −(Σ_ν Φ_ν⊗I) Δ_o.
inline Vector stacked_xi(const Vector& delta_o, const Matrix& adjacency, const Matrix& pinning,
                         Eigen::Index n) {
  const auto phi = phi_matrices(adjacency, pinning);
  Matrix sum = Matrix::Zero(delta_o.size(), delta_o.size());
  for (const auto& p : phi) sum += kron(p, Matrix::Identity(n, n));
  return -sum * delta_o;
}

/// exp(S t) for a 3×3 skew-symmetric S, Rodrigues' formula.
inline Matrix skew_exp(const Matrix& s, double t) {
  const Vector w = Eigen::Vector3d(s(2, 1), s(0, 2), s(1, 0));
  const double th = w.norm() * t;
  const Matrix k = s / w.norm();
  return Matrix::Identity(3, 3) + std::sin(th) * k + (1.0 - std::cos(th)) * k * k;
}

struct QpAnswer {
  bool feasible = false;
  Vector u;
  double objective = std::numeric_limits<double>::infinity();
};

/// min ½‖u − t‖² s.t. rows·u ≤ rhs by enumerating every candidate active
/// set, solving its equality KKT system, and keeping the best point that is
/// primal and dual feasible.
inline QpAnswer qp_enumerate(const Vector& target, const Matrix& rows, const Vector& rhs,
                             double tol = 1e-9) {
  QpAnswer best;
  const Eigen::Index k = rows.rows();
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    std::vector<Eigen::Index> act;
    for (Eigen::Index r = 0; r < k; ++r)
      if (mask & (1u << r)) act.push_back(r);
    const auto na = static_cast<Eigen::Index>(act.size());
    if (na > target.size()) continue;
    Matrix n(na, target.size());
    Vector b(na);
    for (Eigen::Index r = 0; r < na; ++r) {
      n.row(r) = rows.row(act[static_cast<std::size_t>(r)]);
      b(r) = rhs(act[static_cast<std::size_t>(r)]);
    }
    Vector u = target;
    Vector lam = Vector::Zero(na);
    if (na > 0) {
      const Matrix gram = n * n.transpose();
      Eigen::FullPivLU<Matrix> lu(gram);
      if (lu.rank() < na) continue;
      lam = lu.solve(n * target - b);
      u = target - n.transpose() * lam;
    }
    bool ok = true;
    for (Eigen::Index r = 0; r < na && ok; ++r) ok = lam(r) >= -tol;
    for (Eigen::Index r = 0; r < k && ok; ++r)
      ok = rows.row(r).dot(u) - rhs(r) <= tol * (1.0 + std::abs(rhs(r)));
    if (!ok) continue;
    const double obj = 0.5 * (u - target).squaredNorm();
    if (obj < best.objective) {
      best = {true, u, obj};
    }
  }
  return best;
}

}  // namespace oracle
