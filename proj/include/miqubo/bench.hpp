#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "miqubo/data.hpp"
#include "miqubo/infotheory.hpp"
#include "miqubo/solve.hpp"
#include "miqubo/svr.hpp"

namespace miqubo {

/// Row r holds the indices selected for k = r + 1; an empty row means k was
/// not requested or its solve failed.
struct SelectionMatrix {
  std::string method;  // "MI" or "CMI"
  std::vector<std::vector<std::size_t>> rows;

  std::size_t k_max() const { return rows.size(); }
  void validate() const;
};

/// Top-k features by MI, ties by lower index. Result is sorted ascending.
std::vector<std::size_t> mi_selection(const MiReport& report, std::size_t k);

SelectionMatrix mi_selection_matrix(const MiReport& report, std::size_t k_max);

/// CMI-maximizing selection for k = 1..k_max via select_features. A k whose
/// solve is infeasible yields an empty row and is listed in `failed`.
SelectionMatrix cmi_selection_matrix(const CmiTensor& c, std::size_t k_max, Backend backend,
                                     const SolverConfig& config,
                                     std::vector<std::size_t>* failed = nullptr);

/// |MI_k symmetric-difference CMI_k| per k.
std::vector<std::size_t> selection_divergence(const SelectionMatrix& mi,
                                              const SelectionMatrix& cmi);

struct SplitConfig {
  int count = 15;
  double test_ratio = 0.2;
  std::uint64_t seed = 0;
};

/// Train/test index sets. Depends only on (seed, count, test_ratio, n).
std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
make_splits(std::size_t n_samples, const SplitConfig& splits);

struct R2Cell {
  std::string method;
  std::size_t k = 0;
  std::vector<double> r2;           // per split; NaN for a skipped split
  std::vector<bool> skipped;
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) std over completed splits
  std::size_t completed() const;
  double standard_error() const;
};

struct R2Sweep {
  std::vector<R2Cell> cells;
  SplitConfig splits;
  SvrParams svr;

  const R2Cell& at(const std::string& method, std::size_t k) const;
};

/// For every method and k: restrict to the selected columns, scale with
/// training-split statistics, train an SVR per split and score R2 on the
/// held-out rows. Splits are shared by all methods and k.
R2Sweep r2_sweep(const EncodedDataset& e, const std::vector<SelectionMatrix>& selections,
                 const SplitConfig& splits, const SvrParams& svr);

/// Recomputes mean and sample std from the stored per-split values.
void summarize(R2Cell& cell);

struct GapSummary {
  std::size_t k = 0;
  double gap = 0.0;             // mean(CMI) - mean(MI)
  double max_standard_error = 0.0;
  double pooled_std = 0.0;
  bool significant = false;     // gap > max standard error
};

std::vector<GapSummary> gap_summary(const R2Sweep& sweep, const std::string& better = "CMI",
                                    const std::string& baseline = "MI");

}  // namespace miqubo
