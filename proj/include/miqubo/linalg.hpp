#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace miqubo {

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// descending. Iterates until the off-diagonal Frobenius norm drops below
/// `tol` (relative to the matrix norm) or `max_sweeps` is reached.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1>
jacobi_eigenvalues(const Eigen::MatrixBase<Derived>& symmetric,
                   typename Derived::Scalar tol = 1e-12, int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (symmetric.rows() != symmetric.cols())
    throw std::invalid_argument("jacobi_eigenvalues: matrix is not square");

  Matrix a = symmetric;
  const Eigen::Index n = a.rows();
  const Scalar scale = std::max<Scalar>(a.norm(), Scalar(1));

  auto off_norm = [&] {
    Scalar s = 0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) s += 2 * a(p, q) * a(p, q);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (2 * apq);
        const Scalar t = (theta >= 0 ? Scalar(1) : Scalar(-1)) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1));
        const Scalar c = 1 / std::sqrt(t * t + 1);
        const Scalar s = t * c;
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
      }
    }
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values = a.diagonal();
  std::sort(values.data(), values.data() + values.size(), std::greater<Scalar>());
  return values;
}

/// Sample covariance (divisor n - 1) of the columns of `x`.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
column_covariance(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const auto centered = (x.rowwise() - x.colwise().mean()).eval();
  return (centered.transpose() * centered) / Scalar(x.rows() - 1);
}

}  // namespace miqubo
