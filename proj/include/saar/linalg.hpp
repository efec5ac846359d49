#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "saar/common.hpp"

namespace saar::linalg {

inline std::vector<std::complex<double>> eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  std::vector<std::complex<double>> out(solver.eigenvalues().begin(),
                                        solver.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

inline double spectral_abscissa(const Matrix& m) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(m)) worst = std::max(worst, ev.real());
  return worst;
}

inline bool is_hurwitz(const Matrix& m) { return spectral_abscissa(m) < 0.0; }

inline bool is_symmetric(const Matrix& m, double tol = 1e-12) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

/// Symmetric positive definiteness via Cholesky of the symmetric part.
inline bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  Eigen::LLT<Matrix> llt(0.5 * (m + m.transpose()));
  return llt.info() == Eigen::Success;
}

/// Kalman controllability matrix [B, AB, ..., A^{n-1}B].
inline Matrix controllability_matrix(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows();
  Matrix c(n, n * b.cols());
  Matrix block = b;
  for (Eigen::Index k = 0; k < n; ++k) {
    c.middleCols(k * b.cols(), b.cols()) = block;
    block = a * block;
  }
  return c;
}

inline bool is_controllable(const Matrix& a, const Matrix& b) {
  if (b.size() == 0) return false;
  Eigen::ColPivHouseholderQR<Matrix> qr(controllability_matrix(a, b));
  qr.setThreshold(1e-10);
  return qr.rank() == a.rows();
}

inline double min_singular_value(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().minCoeff();
}

/// Solves M X + X Mᵀ = C for symmetric C by Kronecker vectorisation.
/// Intended for the small state dimensions used here (n ≤ ~10).
inline Matrix solve_lyapunov(const Matrix& m, const Matrix& c) {
  const Eigen::Index n = m.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix op = Matrix::Zero(n * n, n * n);
  // vec(MX) = (I ⊗ M) vec(X); vec(XMᵀ) = (M ⊗ I) vec(X), column-major vec.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      op.block(i * n, j * n, n, n) += id(i, j) * m + m(i, j) * id;
    }
  }
  const Vector rhs = Eigen::Map<const Vector>(c.data(), n * n);
  const Vector x = op.fullPivLu().solve(rhs);
  Matrix out = Eigen::Map<const Matrix>(x.data(), n, n);
  return 0.5 * (out + out.transpose());
}

}  // namespace saar::linalg
