#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "miqubo/data.hpp"

namespace miqubo {

/// Dense empirical joint distribution. Cells are stored row-major: the last
/// axis varies fastest. When built with the target included, the target is
/// axis 0 and the requested feature columns follow in order.
struct JointDistribution {
  std::vector<int> dims;
  Eigen::VectorXd probabilities;
  std::size_t support = 0;

  std::size_t rank() const { return dims.size(); }
  double operator()(std::initializer_list<int> index) const;
};

inline constexpr std::size_t default_cell_budget = 10'000'000;

JointDistribution joint_distribution(const DiscretizedTable& t,
                                     const std::vector<std::size_t>& columns,
                                     bool include_target,
                                     std::size_t cell_budget = default_cell_budget);

/// Sums out every axis not listed in `keep`; kept axes retain their order.
JointDistribution marginalize(const JointDistribution& p, const std::vector<std::size_t>& keep);

/// Shannon entropy in nats, 0 log 0 = 0.
double entropy(const JointDistribution& p);

/// MI(X_i; Y) in nats from the empirical joint of feature i and the target.
double mutual_information(const DiscretizedTable& t, std::size_t feature);

/// MI(X_j; Y | X_i) in nats from the empirical triple joint.
double conditional_mutual_information(const DiscretizedTable& t, std::size_t feature,
                                      std::size_t given);

/// Conditional entropy S(Y | X_i) of the target given feature i.
double conditional_target_entropy(const DiscretizedTable& t, std::size_t feature);

/// Clamps tiny negative round-off to zero; larger negatives are a logic error.
double clamp_information(double value);

struct MiReport {
  std::vector<std::string> feature_names;
  Eigen::VectorXd mi;  // nats
  double total_mi = 0.0;
  double concentration = 1.0;  // share of total held by the top two

  /// Feature indices by decreasing MI, ties broken by lower index.
  std::vector<std::size_t> ranking() const;
};

MiReport mi_report(const DiscretizedTable& t, const std::vector<std::string>& names);

/// values(i, j), i != j, holds MI(X_j; Y | X_i); the diagonal holds MI(X_i; Y).
struct CmiTensor {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd values;

  Eigen::Index size() const { return values.rows(); }
};

CmiTensor cmi_tensor(const DiscretizedTable& t, const std::vector<std::string>& names = {},
                     std::size_t cell_budget = default_cell_budget);

/// PCA explained-variance ratios, descending. Throws InputError when the
/// total variance is zero.
Eigen::VectorXd explained_variance_ratio(const EncodedDataset& e);

}  // namespace miqubo
