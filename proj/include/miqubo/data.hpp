#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "miqubo/error.hpp"

namespace miqubo {

using NumericColumn = std::vector<double>;
using CategoricalColumn = std::vector<std::string>;
using Column = std::variant<NumericColumn, CategoricalColumn>;

enum class ColumnKind { numeric, categorical };

/// Raw tabular data: named feature columns plus a numeric target.
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<Column> columns;
  Eigen::VectorXd target;
  std::string target_name;

  std::size_t n_samples() const { return static_cast<std::size_t>(target.size()); }
  std::size_t n_features() const { return columns.size(); }

  /// Throws InputError when lengths disagree or names are empty/duplicated.
  void validate() const;
};

/// Dense real view after one-hot expansion. `origin[j]` indexes the raw
/// feature in `raw_names` that encoded column j came from.
struct EncodedDataset {
  std::vector<std::string> feature_names;
  Eigen::MatrixXd matrix;  // n_samples x n_features
  Eigen::VectorXd target;
  std::string target_name;
  std::vector<std::string> raw_names;
  std::vector<std::size_t> origin;

  Eigen::Index n_samples() const { return matrix.rows(); }
  Eigen::Index n_features() const { return matrix.cols(); }

  /// Keeps only the listed encoded columns (in the given order).
  EncodedDataset select_columns(const std::vector<std::size_t>& columns) const;
  /// Keeps only the listed rows (in the given order).
  EncodedDataset select_rows(const std::vector<std::size_t>& rows) const;
};

/// Integer-binned view of every column; the substrate for all empirical
/// probability estimates.
struct DiscretizedTable {
  Eigen::MatrixXi codes;  // n_samples x n_features
  std::vector<int> bin_counts;
  Eigen::VectorXi target_codes;
  int target_bin_count = 1;

  Eigen::Index n_samples() const { return codes.rows(); }
  Eigen::Index n_features() const { return codes.cols(); }
};

struct CsvOptions {
  /// Optional per-column type override; unlisted columns are inferred.
  std::map<std::string, ColumnKind> schema;
};

Dataset load_csv(const std::filesystem::path& path, const std::string& target_name,
                 const CsvOptions& options = {});
Dataset parse_csv(std::istream& in, const std::string& target_name,
                  const CsvOptions& options = {});
void write_csv(std::ostream& out, const Dataset& d);

/// Categorical columns become one indicator per distinct value, named
/// `<feature>_<value>`, values in sorted order. Numeric columns pass through.
EncodedDataset one_hot_encode(const Dataset& d);

/// Codes for a single column. Columns with at most `bins` distinct values get
/// one code per value in rank order; others are equal-width binned over
/// [min, max] with right-closed bins. Returns the number of codes used.
int discretize_column(const Eigen::Ref<const Eigen::VectorXd>& column, int bins,
                      Eigen::Ref<Eigen::VectorXi> codes);

DiscretizedTable discretize(const EncodedDataset& e, int bins = 10);

/// Column-wise (x - mean) / std with the population (divisor n) standard
/// deviation. Constant columns become zero.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
standardize_columns(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const Scalar mean = x.col(j).mean();
    const auto centered = (x.col(j).array() - mean).eval();
    const Scalar sd = std::sqrt(centered.square().mean());
    if (sd > Scalar(0) && std::isfinite(sd))
      out.col(j) = centered / sd;
    else
      out.col(j).setZero();
  }
  return out;
}

EncodedDataset standardize(const EncodedDataset& e);

/// Per-column affine scaling fitted on one sample set and applied to another
/// (train-split statistics applied to the test split).
struct ColumnScaler {
  Eigen::RowVectorXd mean;
  Eigen::RowVectorXd scale;  // 0 for constant columns

  static ColumnScaler fit(const Eigen::MatrixXd& x);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
};

enum class MiConcentration { high, low };

struct CategoricalSpec {
  std::string name;
  int n_categories = 2;
  bool informative = false;
};

struct SyntheticProfile {
  int n_samples = 500;
  int n_informative = 3;
  int n_redundant = 2;
  int n_noise = 2;
  std::vector<CategoricalSpec> categorical_spec;
  MiConcentration mi_concentration = MiConcentration::high;
  std::uint64_t seed = 0;

  /// Histogram resolution used for the concentration self-check.
  int check_bins = 10;
  int max_retries = 12;
};

/// Deterministic synthetic regression data with a controllable share of
/// feature-target MI held by the strongest features. Throws InputError when
/// the profile is invalid or the concentration target cannot be met.
Dataset generate_synthetic(const SyntheticProfile& profile);

}  // namespace miqubo
