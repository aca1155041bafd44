// Command-line front end: mi-rank, select, evaluate, pipeline, synth.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "miqubo/error.hpp"
#include "miqubo/pipeline.hpp"

namespace {

using miqubo::json;
using miqubo::RunConfig;

struct Flags {
  std::string config_file;
  std::string input;
  std::string profile;
  std::string concentration;
  std::string target;
  std::string backend;
  std::string selection;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> bins, k, k_min, k_max, splits, n_samples;
  std::optional<double> gamma, c, epsilon, test_ratio;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw miqubo::InputError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw miqubo::InputError("'" + path + "': " + e.what());
  }
}

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "JSON run configuration");
  cmd->add_option("--input", f.input, "CSV dataset");
  cmd->add_option("--profile", f.profile, "JSON synthetic profile (instead of --input)");
  cmd->add_option("--concentration", f.concentration, "synthetic profile: high|low");
  cmd->add_option("--n-samples", f.n_samples, "synthetic profile: sample count");
  cmd->add_option("--target", f.target, "target column name");
  cmd->add_option("--bins", f.bins, "histogram bins for MI estimation");
  cmd->add_option("--k", f.k, "single cardinality (sets k-min = k-max)");
  cmd->add_option("--k-min", f.k_min, "smallest k");
  cmd->add_option("--k-max", f.k_max, "largest k");
  cmd->add_option("--backend", f.backend, "exhaustive|sa|tabu|hybrid");
  cmd->add_option("--gamma", f.gamma, "rbf kernel width");
  cmd->add_option("--C", f.c, "SVR regularization");
  cmd->add_option("--epsilon", f.epsilon, "SVR tube width");
  cmd->add_option("--splits", f.splits, "number of random train/test splits");
  cmd->add_option("--test-ratio", f.test_ratio, "held-out fraction per split");
  cmd->add_option("--selection", f.selection, "selection.json to evaluate");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--seed", f.seed, "master seed (required)");
}

RunConfig build_config(const Flags& f) {
  RunConfig c;
  if (!f.config_file.empty()) read_json_file(f.config_file).get_to(c);
  if (!f.input.empty()) {
    c.input = f.input;
    c.synthetic.reset();
  }
  if (!f.profile.empty()) {
    c.synthetic = read_json_file(f.profile).get<miqubo::SyntheticProfile>();
    c.input.reset();
  }
  if (!f.concentration.empty() || f.n_samples) {
    if (!c.synthetic) c.synthetic.emplace();
    if (!f.concentration.empty()) {
      json j{{"mi_concentration", f.concentration}};
      miqubo::from_json(j, *c.synthetic);
    }
    if (f.n_samples) c.synthetic->n_samples = *f.n_samples;
  }
  if (!f.target.empty()) c.target = f.target;
  if (f.bins) c.bins = *f.bins;
  if (f.k) c.k_min = c.k_max = *f.k;
  if (f.k_min) c.k_min = *f.k_min;
  if (f.k_max) c.k_max = *f.k_max;
  if (!f.backend.empty()) c.backend = miqubo::parse_backend(f.backend);
  if (f.gamma) c.svr.kernel.gamma = *f.gamma;
  if (f.c) c.svr.C = *f.c;
  if (f.epsilon) c.svr.epsilon = *f.epsilon;
  if (f.splits) c.splits.count = *f.splits;
  if (f.test_ratio) c.splits.test_ratio = *f.test_ratio;
  if (!f.selection.empty()) c.selection_file = f.selection;
  if (!f.out.empty()) c.output_dir = f.out;
  if (f.seed) {
    c.seed = *f.seed;
    if (c.synthetic && f.profile.empty() && f.config_file.empty()) c.synthetic->seed = *f.seed;
  }
  if (c.synthetic && c.seed && !f.profile.empty() && !read_json_file(f.profile).contains("seed"))
    c.synthetic->seed = *c.seed;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature selection by conditional mutual information QUBOs"};
  app.require_subcommand(1);

  Flags flags;
  std::string synth_output;
  auto* mi_rank = app.add_subcommand("mi-rank", "rank encoded features by MI with the target");
  auto* select = app.add_subcommand("select", "CMI-maximizing selection per k");
  auto* evaluate = app.add_subcommand("evaluate", "R2 sweep of MI vs CMI selections");
  auto* pipeline = app.add_subcommand("pipeline", "mi-rank, select and evaluate with a manifest");
  auto* synth = app.add_subcommand("synth", "write a synthetic dataset as CSV");
  for (auto* cmd : {mi_rank, select, evaluate, pipeline, synth}) add_common(cmd, flags);
  synth->add_option("--output,-o", synth_output, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    RunConfig config = build_config(flags);
    miqubo::StageOutput out;
    if (synth->parsed()) {
      if (!config.seed) throw miqubo::InputError("--seed is required");
      out = miqubo::cmd_synth(config, synth_output);
    } else {
      config.validate();
      if (mi_rank->parsed()) out = miqubo::cmd_mi_rank(config);
      if (select->parsed()) out = miqubo::cmd_select(config);
      if (evaluate->parsed()) out = miqubo::cmd_evaluate(config);
      if (pipeline->parsed()) out = miqubo::cmd_pipeline(config);
    }
    for (const auto& f : out.files) std::cout << f.string() << '\n';
    return 0;
  } catch (const miqubo::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
