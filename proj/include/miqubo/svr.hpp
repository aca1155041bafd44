#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace miqubo {

enum class KernelKind { rbf, linear };

struct KernelParams {
  KernelKind kind = KernelKind::rbf;
  double gamma = 1.0;

  void validate() const;
};

/// K(i, j) = exp(-gamma |x_i - z_j|^2) for rbf, x_i . z_j for linear.
template <typename DerivedX, typename DerivedZ>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, Eigen::Dynamic>
kernel_matrix(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedZ>& z,
              const KernelParams& p) {
  using Scalar = typename DerivedX::Scalar;
  if (x.cols() != z.cols())
    throw std::invalid_argument("kernel_matrix: inputs differ in dimension");
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> k = x * z.transpose();
  if (p.kind == KernelKind::linear) return k;
  const auto xn = x.rowwise().squaredNorm().eval();
  const auto zn = z.rowwise().squaredNorm().eval();
  for (Eigen::Index j = 0; j < k.cols(); ++j) {
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
      // Clamp: the expanded form can dip slightly below zero.
      const Scalar d2 = std::max(Scalar(0), xn(i) + zn(j) - 2 * k(i, j));
      k(i, j) = std::exp(-Scalar(p.gamma) * d2);
    }
  }
  return k;
}

struct SvrParams {
  double C = 1.0;
  double epsilon = 1e-3;
  KernelParams kernel;
  double tol = 1e-3;
  std::size_t max_iterations = 100'000;
  /// Record the dual objective after every pair update.
  bool record_objective = false;
};

struct SvrModel {
  Eigen::MatrixXd support_inputs;
  Eigen::VectorXd dual_coefs;  // alpha*_i - alpha_i
  double bias = 0.0;
  KernelParams params;
  double C = 1.0;
  double epsilon = 1e-3;

  // Training diagnostics.
  std::size_t iterations = 0;
  double final_violation = 0.0;
  std::vector<double> objective_history;
};

/// epsilon-SVR trained on the dual by maximal-violating-pair coordinate
/// updates. Throws ConvergenceError when the iteration cap is hit.
SvrModel train_svr(const Eigen::MatrixXd& x, const Eigen::VectorXd& z, const SvrParams& params);

Eigen::VectorXd predict(const SvrModel& m, const Eigen::MatrixXd& x);

/// Coefficient of determination; throws std::invalid_argument when z_true
/// is constant or the lengths differ.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar r2_score(const Eigen::MatrixBase<DerivedA>& z_true,
                                   const Eigen::MatrixBase<DerivedB>& z_pred) {
  using Scalar = typename DerivedA::Scalar;
  if (z_true.size() != z_pred.size() || z_true.size() < 2)
    throw std::invalid_argument("r2_score: need two equal-length vectors of size >= 2");
  const Scalar mean = z_true.mean();
  const Scalar total = (z_true.array() - mean).square().sum();
  if (total == Scalar(0)) throw std::invalid_argument("r2_score: constant z_true");
  const Scalar residual = (z_true - z_pred).squaredNorm();
  return Scalar(1) - residual / total;
}

}  // namespace miqubo
