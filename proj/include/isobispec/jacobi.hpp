#pragma once

#include <Eigen/Core>

#include <cmath>

namespace isobispec {

template <typename Scalar>
struct SymmetricEigen {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;
  /// Columns are orthonormal eigenvectors, in the order of `values`.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;
  int sweeps = 0;
  bool converged = false;
};

/// Cyclic Jacobi eigensolver for a dense real symmetric matrix. Only the upper
/// triangle is read. Sweeps continue until the off-diagonal Frobenius norm is
/// below `tol` times the Frobenius norm of the input.
template <typename Derived>
SymmetricEigen<typename Derived::Scalar> jacobi_eigen(const Eigen::MatrixBase<Derived>& input,
                                                      typename Derived::Scalar tol = 1e-14,
                                                      int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const Eigen::Index n = input.rows();

  Matrix a = input.template selfadjointView<Eigen::Upper>();
  Matrix v = Matrix::Identity(n, n);
  SymmetricEigen<Scalar> out;

  const Scalar scale = a.norm();
  if (scale == Scalar(0)) {
    out.values = a.diagonal();
    out.vectors = v;
    out.converged = true;
    return out;
  }

  auto off_norm = [&] {
    Scalar s = 0;
    for (Eigen::Index j = 1; j < n; ++j) s += a.col(j).head(j).squaredNorm();
    return std::sqrt(2 * s);
  };

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    if (off_norm() <= tol * scale) {
      out.converged = true;
      break;
    }
    ++out.sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t = std::abs(theta) > Scalar(1e150)
                             ? 1 / (2 * theta)
                             : (theta >= 0 ? 1 : -1) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Scalar c = 1 / std::sqrt(t * t + 1);
        const Scalar s = t * c;

        // A <- J^T A J with J the rotation in the (p, q) plane.
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar akp = a(k, p);
          const Scalar akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar apk = a(p, k);
          const Scalar aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const Scalar vkp = v(k, p);
          const Scalar vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!out.converged && off_norm() <= tol * scale) out.converged = true;

  out.values = a.diagonal();
  out.vectors = std::move(v);
  return out;
}

}  // namespace isobispec
