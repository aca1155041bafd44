#include "miqubo/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "miqubo/linalg.hpp"

namespace miqubo {

namespace {

constexpr double negative_floor = -1e-12;

std::vector<std::size_t> strides_of(const std::vector<int>& dims) {
  std::vector<std::size_t> strides(dims.size(), 1);
  for (std::size_t a = dims.size(); a-- > 1;)
    strides[a - 1] = strides[a] * static_cast<std::size_t>(dims[a]);
  return strides;
}

// Counts of (target, feature) pairs as a dense target-major matrix.
Eigen::MatrixXd pair_counts(const DiscretizedTable& t, std::size_t feature) {
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(t.target_bin_count, t.bin_counts[feature]);
  const auto col = static_cast<Eigen::Index>(feature);
  for (Eigen::Index r = 0; r < t.n_samples(); ++r) counts(t.target_codes(r), t.codes(r, col)) += 1.0;
  return counts;
}

void check_feature(const DiscretizedTable& t, std::size_t feature) {
  if (feature >= static_cast<std::size_t>(t.n_features()))
    throw std::out_of_range("feature index " + std::to_string(feature) + " out of range");
}

}  // namespace

double clamp_information(double value) {
  if (value >= 0.0) return value;
  if (value >= negative_floor) return 0.0;
  throw std::logic_error("information measure is negative beyond round-off: " +
                         std::to_string(value));
}

double JointDistribution::operator()(std::initializer_list<int> index) const {
  if (index.size() != dims.size()) throw std::invalid_argument("JointDistribution: rank mismatch");
  const auto strides = strides_of(dims);
  std::size_t flat = 0;
  std::size_t a = 0;
  for (int i : index) flat += static_cast<std::size_t>(i) * strides[a++];
  return probabilities(static_cast<Eigen::Index>(flat));
}

JointDistribution joint_distribution(const DiscretizedTable& t,
                                     const std::vector<std::size_t>& columns, bool include_target,
                                     std::size_t cell_budget) {
  JointDistribution p;
  if (include_target) p.dims.push_back(t.target_bin_count);
  for (auto c : columns) {
    check_feature(t, c);
    p.dims.push_back(t.bin_counts[c]);
  }
  std::size_t cells = 1;
  for (int d : p.dims) {
    cells *= static_cast<std::size_t>(d);
    if (cells > cell_budget)
      throw std::length_error("joint distribution exceeds the cell budget of " +
                              std::to_string(cell_budget));
  }

  const auto strides = strides_of(p.dims);
  p.probabilities = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cells));
  for (Eigen::Index r = 0; r < t.n_samples(); ++r) {
    std::size_t flat = 0;
    std::size_t a = 0;
    if (include_target) flat += static_cast<std::size_t>(t.target_codes(r)) * strides[a++];
    for (auto c : columns)
      flat += static_cast<std::size_t>(t.codes(r, static_cast<Eigen::Index>(c))) * strides[a++];
    p.probabilities(static_cast<Eigen::Index>(flat)) += 1.0;
  }
  p.support = static_cast<std::size_t>((p.probabilities.array() > 0.0).count());
  p.probabilities /= static_cast<double>(t.n_samples());
  return p;
}

JointDistribution marginalize(const JointDistribution& p, const std::vector<std::size_t>& keep) {
  JointDistribution out;
  for (auto a : keep) {
    if (a >= p.rank()) throw std::out_of_range("marginalize: axis out of range");
    out.dims.push_back(p.dims[a]);
  }
  const auto in_strides = strides_of(p.dims);
  const auto out_strides = strides_of(out.dims);
  const auto out_cells = std::accumulate(out.dims.begin(), out.dims.end(), std::size_t{1},
                                         [](std::size_t acc, int d) { return acc * d; });
  out.probabilities = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out_cells));
  for (Eigen::Index flat = 0; flat < p.probabilities.size(); ++flat) {
    const double mass = p.probabilities(flat);
    if (mass == 0.0) continue;
    std::size_t target = 0;
    for (std::size_t k = 0; k < keep.size(); ++k) {
      const std::size_t index =
          (static_cast<std::size_t>(flat) / in_strides[keep[k]]) % static_cast<std::size_t>(p.dims[keep[k]]);
      target += index * out_strides[k];
    }
    out.probabilities(static_cast<Eigen::Index>(target)) += mass;
  }
  out.support = static_cast<std::size_t>((out.probabilities.array() > 0.0).count());
  return out;
}

double entropy(const JointDistribution& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.probabilities.size(); ++i) {
    const double v = p.probabilities(i);
    if (v > 0.0) s -= v * std::log(v);
  }
  return clamp_information(s);
}

double mutual_information(const DiscretizedTable& t, std::size_t feature) {
  check_feature(t, feature);
  const Eigen::MatrixXd counts = pair_counts(t, feature);
  const double n = static_cast<double>(t.n_samples());
  const Eigen::VectorXd py = counts.rowwise().sum() / n;
  const Eigen::RowVectorXd px = counts.colwise().sum() / n;
  double mi = 0.0;
  for (Eigen::Index y = 0; y < counts.rows(); ++y) {
    for (Eigen::Index x = 0; x < counts.cols(); ++x) {
      const double pxy = counts(y, x) / n;
      if (pxy > 0.0) mi += pxy * std::log(pxy / (px(x) * py(y)));
    }
  }
  return clamp_information(mi);
}

double conditional_target_entropy(const DiscretizedTable& t, std::size_t feature) {
  check_feature(t, feature);
  const Eigen::MatrixXd counts = pair_counts(t, feature);
  const double n = static_cast<double>(t.n_samples());
  const Eigen::RowVectorXd px = counts.colwise().sum() / n;
  double s = 0.0;
  for (Eigen::Index y = 0; y < counts.rows(); ++y) {
    for (Eigen::Index x = 0; x < counts.cols(); ++x) {
      const double pxy = counts(y, x) / n;
      if (pxy > 0.0) s -= pxy * std::log(pxy / px(x));
    }
  }
  return clamp_information(s);
}

double conditional_mutual_information(const DiscretizedTable& t, std::size_t feature,
                                      std::size_t given) {
  check_feature(t, feature);
  check_feature(t, given);
  if (feature == given)
    throw std::invalid_argument("conditional_mutual_information: feature equals condition");

  // Axes: (target, feature, given).
  const JointDistribution joint = joint_distribution(t, {feature, given}, true);
  const int ny = joint.dims[0];
  const int nf = joint.dims[1];
  const int ng = joint.dims[2];
  Eigen::VectorXd p_given = Eigen::VectorXd::Zero(ng);
  Eigen::MatrixXd p_target_given = Eigen::MatrixXd::Zero(ny, ng);
  Eigen::MatrixXd p_feature_given = Eigen::MatrixXd::Zero(nf, ng);
  for (int y = 0; y < ny; ++y)
    for (int f = 0; f < nf; ++f)
      for (int g = 0; g < ng; ++g) {
        const double v = joint.probabilities((y * nf + f) * ng + g);
        p_given(g) += v;
        p_target_given(y, g) += v;
        p_feature_given(f, g) += v;
      }

  // sum p(y,f,g) log[ p(y,f|g) / (p(y|g) p(f|g)) ]; zero-mass cells add 0.
  double cmi = 0.0;
  for (int y = 0; y < ny; ++y)
    for (int f = 0; f < nf; ++f)
      for (int g = 0; g < ng; ++g) {
        const double v = joint.probabilities((y * nf + f) * ng + g);
        if (v <= 0.0) continue;
        cmi += v * std::log(v * p_given(g) / (p_target_given(y, g) * p_feature_given(f, g)));
      }
  return clamp_information(cmi);
}

std::vector<std::size_t> MiReport::ranking() const {
  std::vector<std::size_t> order(static_cast<std::size_t>(mi.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return mi(static_cast<Eigen::Index>(a)) > mi(static_cast<Eigen::Index>(b));
  });
  return order;
}

MiReport mi_report(const DiscretizedTable& t, const std::vector<std::string>& names) {
  if (t.n_features() < 1) throw InputError("mi_report: need at least one feature");
  MiReport report;
  report.feature_names = names;
  if (report.feature_names.empty())
    for (Eigen::Index j = 0; j < t.n_features(); ++j)
      report.feature_names.push_back("x" + std::to_string(j));
  if (report.feature_names.size() != static_cast<std::size_t>(t.n_features()))
    throw std::invalid_argument("mi_report: name count does not match feature count");

  report.mi.resize(t.n_features());
  for (Eigen::Index j = 0; j < t.n_features(); ++j)
    report.mi(j) = mutual_information(t, static_cast<std::size_t>(j));
  report.total_mi = report.mi.sum();

  const auto order = report.ranking();
  double top = report.mi(static_cast<Eigen::Index>(order[0]));
  if (order.size() > 1) top += report.mi(static_cast<Eigen::Index>(order[1]));
  report.concentration = report.total_mi > 0.0 ? top / report.total_mi : 1.0;
  return report;
}

CmiTensor cmi_tensor(const DiscretizedTable& t, const std::vector<std::string>& names,
                     std::size_t cell_budget) {
  const Eigen::Index n = t.n_features();
  if (n < 1) throw InputError("cmi_tensor: need at least one feature");
  CmiTensor c;
  c.feature_names = names;
  c.values.resize(n, n);

  std::size_t max_bins = 1;
  for (int b : t.bin_counts) max_bins = std::max(max_bins, static_cast<std::size_t>(b));
  if (max_bins * max_bins * static_cast<std::size_t>(t.target_bin_count) > cell_budget)
    throw std::length_error("cmi_tensor: triple joint exceeds the cell budget");

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      c.values(i, j) = i == j ? mutual_information(t, static_cast<std::size_t>(i))
                              : conditional_mutual_information(t, static_cast<std::size_t>(j),
                                                               static_cast<std::size_t>(i));
    }
  }
  return c;
}

Eigen::VectorXd explained_variance_ratio(const EncodedDataset& e) {
  if (e.n_features() < 1) throw InputError("explained_variance_ratio: need at least one feature");
  if (e.n_samples() < 2) throw InputError("explained_variance_ratio: need at least two samples");
  const Eigen::MatrixXd cov = column_covariance(e.matrix);
  Eigen::VectorXd lambda = jacobi_eigenvalues(cov, 1e-12);
  // PSD up to round-off.
  lambda = lambda.cwiseMax(0.0);
  const double total = lambda.sum();
  if (!(total > 0.0)) throw InputError("explained_variance_ratio: zero total variance");
  return lambda / total;
}

}  // namespace miqubo
