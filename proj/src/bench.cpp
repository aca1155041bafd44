#include "miqubo/bench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "miqubo/error.hpp"
#include "miqubo/random.hpp"

namespace miqubo {

void SelectionMatrix::validate() const {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;  // failed solve
    const std::set<std::size_t> distinct(rows[r].begin(), rows[r].end());
    if (rows[r].size() != r + 1 || distinct.size() != r + 1)
      throw InputError("selection matrix: row for k = " + std::to_string(r + 1) +
                       " must hold exactly k distinct indices");
  }
}

std::vector<std::size_t> mi_selection(const MiReport& report, std::size_t k) {
  if (k > static_cast<std::size_t>(report.mi.size()))
    throw InputError("mi_selection: k exceeds the feature count");
  auto order = report.ranking();
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

SelectionMatrix mi_selection_matrix(const MiReport& report, std::size_t k_max) {
  SelectionMatrix m{"MI", {}};
  for (std::size_t k = 1; k <= k_max; ++k) m.rows.push_back(mi_selection(report, k));
  return m;
}

SelectionMatrix cmi_selection_matrix(const CmiTensor& c, std::size_t k_max, Backend backend,
                                     const SolverConfig& config,
                                     std::vector<std::size_t>* failed) {
  if (k_max > static_cast<std::size_t>(c.size()))
    throw InputError("cmi_selection_matrix: k_max exceeds the feature count");
  SelectionMatrix m{"CMI", {}};
  for (std::size_t k = 1; k <= k_max; ++k) {
    try {
      m.rows.push_back(select_features(c, static_cast<int>(k), backend, config).indices);
    } catch (const InfeasibleError&) {
      m.rows.emplace_back();
      if (failed) failed->push_back(k);
    }
  }
  return m;
}

std::vector<std::size_t> selection_divergence(const SelectionMatrix& mi,
                                              const SelectionMatrix& cmi) {
  if (mi.rows.size() != cmi.rows.size())
    throw InputError("selection_divergence: matrices cover different k ranges");
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < mi.rows.size(); ++r) {
    std::vector<std::size_t> a = mi.rows[r], b = cmi.rows[r], diff;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(diff));
    out.push_back(diff.size());
  }
  return out;
}

std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
make_splits(std::size_t n_samples, const SplitConfig& splits) {
  if (splits.count < 1) throw InputError("splits: count must be >= 1");
  if (!(splits.test_ratio > 0.0 && splits.test_ratio < 1.0))
    throw InputError("splits: test_ratio must lie in (0, 1)");
  if (n_samples < 3) throw InputError("splits: need at least three samples");
  const auto n_test = static_cast<std::size_t>(
      std::clamp<double>(std::round(splits.test_ratio * static_cast<double>(n_samples)), 1.0,
                         static_cast<double>(n_samples) - 2.0));

  std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> out;
  for (int s = 0; s < splits.count; ++s) {
    std::vector<std::size_t> perm(n_samples);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(splits.seed, 0x5e, static_cast<std::uint64_t>(s)));
    rng.shuffle(perm.begin(), perm.end());
    std::vector<std::size_t> test(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(perm.begin() + static_cast<std::ptrdiff_t>(n_test), perm.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    out.emplace_back(std::move(train), std::move(test));
  }
  return out;
}

std::size_t R2Cell::completed() const {
  return static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), false));
}

double R2Cell::standard_error() const {
  const auto n = completed();
  return n > 0 ? stddev / std::sqrt(static_cast<double>(n)) : std::numeric_limits<double>::quiet_NaN();
}

void summarize(R2Cell& cell) {
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t s = 0; s < cell.r2.size(); ++s)
    if (!cell.skipped[s]) {
      sum += cell.r2[s];
      ++n;
    }
  if (n == 0) {
    cell.mean = cell.stddev = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  cell.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (std::size_t s = 0; s < cell.r2.size(); ++s)
    if (!cell.skipped[s]) ss += (cell.r2[s] - cell.mean) * (cell.r2[s] - cell.mean);
  cell.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
}

const R2Cell& R2Sweep::at(const std::string& method, std::size_t k) const {
  for (const auto& c : cells)
    if (c.method == method && c.k == k) return c;
  throw std::out_of_range("R2Sweep: no cell for " + method + " k = " + std::to_string(k));
}

namespace {

double split_r2(const EncodedDataset& e, const std::vector<std::size_t>& columns,
                const std::vector<std::size_t>& train, const std::vector<std::size_t>& test,
                const SvrParams& svr) {
  const auto rows = [&](const std::vector<std::size_t>& idx) {
    Eigen::MatrixXd x(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (std::size_t c = 0; c < columns.size(); ++c)
        x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            e.matrix(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(columns[c]));
    return x;
  };
  const auto targets = [&](const std::vector<std::size_t>& idx) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t r = 0; r < idx.size(); ++r) z(static_cast<Eigen::Index>(r)) = e.target(static_cast<Eigen::Index>(idx[r]));
    return z;
  };

  const Eigen::MatrixXd x_train_raw = rows(train);
  const auto scaler = ColumnScaler::fit(x_train_raw);
  const Eigen::MatrixXd x_train = scaler.apply(x_train_raw);
  const Eigen::MatrixXd x_test = scaler.apply(rows(test));

  // Target scaled with training statistics too; R2 is invariant under the
  // shared affine map.
  const Eigen::VectorXd z_train_raw = targets(train);
  const double z_mean = z_train_raw.mean();
  double z_sd = std::sqrt((z_train_raw.array() - z_mean).square().mean());
  if (!(z_sd > 0.0)) z_sd = 1.0;
  const Eigen::VectorXd z_train = (z_train_raw.array() - z_mean) / z_sd;
  const Eigen::VectorXd z_test = (targets(test).array() - z_mean) / z_sd;

  const SvrModel model = train_svr(x_train, z_train, svr);
  return r2_score(z_test, predict(model, x_test));
}

}  // namespace

R2Sweep r2_sweep(const EncodedDataset& e, const std::vector<SelectionMatrix>& selections,
                 const SplitConfig& splits, const SvrParams& svr) {
  if (selections.empty()) throw InputError("r2_sweep: no selections given");
  R2Sweep sweep;
  sweep.splits = splits;
  sweep.svr = svr;
  const auto split_sets = make_splits(static_cast<std::size_t>(e.n_samples()), splits);

  for (const auto& selection : selections) {
    selection.validate();
    for (std::size_t r = 0; r < selection.rows.size(); ++r) {
      if (selection.rows[r].empty()) continue;  // k outside the requested range or failed
      R2Cell cell;
      cell.method = selection.method;
      cell.k = r + 1;
      const auto& columns = selection.rows[r];
      for (const auto& [train, test] : split_sets) {
        double value = std::numeric_limits<double>::quiet_NaN();
        bool skip = false;
        try {
          value = split_r2(e, columns, train, test, svr);
        } catch (const ConvergenceError&) {
          skip = true;
        } catch (const std::invalid_argument&) {
          skip = true;  // constant test target
        }
        cell.r2.push_back(skip ? std::numeric_limits<double>::quiet_NaN() : value);
        cell.skipped.push_back(skip);
      }
      summarize(cell);
      sweep.cells.push_back(std::move(cell));
    }
  }
  return sweep;
}

std::vector<GapSummary> gap_summary(const R2Sweep& sweep, const std::string& better,
                                    const std::string& baseline) {
  std::vector<GapSummary> out;
  for (const auto& cell : sweep.cells) {
    if (cell.method != better) continue;
    const R2Cell* base = nullptr;
    for (const auto& c : sweep.cells)
      if (c.method == baseline && c.k == cell.k) base = &c;
    if (!base) continue;
    GapSummary g;
    g.k = cell.k;
    g.gap = cell.mean - base->mean;
    g.max_standard_error = std::max(cell.standard_error(), base->standard_error());
    g.pooled_std = std::sqrt(0.5 * (cell.stddev * cell.stddev + base->stddev * base->stddev));
    g.significant = g.gap > g.max_standard_error;
    out.push_back(g);
  }
  return out;
}

}  // namespace miqubo
