#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "miqubo/bench.hpp"
#include "miqubo/serialize.hpp"

namespace miqubo {

/// Everything a CLI run needs. Exactly one of `input` and `synthetic` is set.
struct RunConfig {
  std::optional<std::string> input;
  std::optional<SyntheticProfile> synthetic;
  std::string target = "target";
  std::map<std::string, ColumnKind> schema;
  int bins = 10;
  int k_min = 1;
  int k_max = 0;  // 0: min(n_features, 10)
  Backend backend = Backend::hybrid;
  SolverConfig solver;
  SvrParams svr;
  SplitConfig splits;
  std::optional<std::string> selection_file;
  std::string output_dir = "run";
  std::optional<std::uint64_t> seed;

  /// Throws InputError on invariant violations.
  void validate() const;
  /// Solver, split and synthetic seeds derived from the master seed.
  RunConfig with_derived_seeds() const;
};

void to_json(json& j, const RunConfig& c);
void from_json(const json& j, RunConfig& c);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& c);

struct PreparedData {
  EncodedDataset encoded;
  DiscretizedTable table;
};

PreparedData prepare_data(const RunConfig& c);

struct StageOutput {
  std::vector<std::filesystem::path> files;
};

StageOutput cmd_mi_rank(const RunConfig& c);
StageOutput cmd_select(const RunConfig& c);
StageOutput cmd_evaluate(const RunConfig& c);
/// Runs the three stages into output_dir and writes manifest.json.
StageOutput cmd_pipeline(const RunConfig& c);
/// Writes the synthetic dataset as CSV to `path`.
StageOutput cmd_synth(const RunConfig& c, const std::filesystem::path& path);

}  // namespace miqubo
