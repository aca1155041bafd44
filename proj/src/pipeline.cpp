#include "miqubo/pipeline.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "miqubo/error.hpp"
#include "miqubo/random.hpp"
#include "miqubo/svg.hpp"

namespace miqubo {

namespace {

constexpr const char* tool_version = "0.1.0";

namespace fs = std::filesystem;

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& content) {
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  return path;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::size_t resolved_k_max(const RunConfig& c, std::size_t n_features) {
  const std::size_t k = c.k_max > 0 ? static_cast<std::size_t>(c.k_max) : std::min<std::size_t>(n_features, 10);
  if (k > n_features)
    throw InputError("k_max = " + std::to_string(k) + " exceeds the " + std::to_string(n_features) +
                     " encoded features");
  if (static_cast<std::size_t>(c.k_min) > k) throw InputError("k_min exceeds k_max");
  return k;
}

struct Selections {
  SelectionMatrix mi;
  SelectionMatrix cmi;
};

Selections read_selection_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open selection file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("selection file '" + path.string() + "': " + e.what());
  }
  Selections s;
  j.at("mi").get_to(s.mi);
  j.at("cmi").get_to(s.cmi);
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (input.has_value() == synthetic.has_value())
    throw InputError("config: exactly one of input and synthetic profile must be given");
  if (!seed) throw InputError("config: --seed is required");
  if (bins < 2) throw InputError("config: bins must be >= 2");
  if (k_min < 1) throw InputError("config: k_min must be >= 1");
  if (k_max < 0) throw InputError("config: k_max must be >= 0");
}

RunConfig RunConfig::with_derived_seeds() const {
  RunConfig c = *this;
  const std::uint64_t s = seed.value_or(0);
  c.solver.sa.seed = derive_seed(s, 0x5a);
  c.solver.tabu.seed = derive_seed(s, 0x7a);
  c.solver.hybrid.seed = derive_seed(s, 0x4b);
  c.solver.hybrid.sa.seed = derive_seed(s, 0x4b, 1);
  c.solver.hybrid.tabu.seed = derive_seed(s, 0x4b, 2);
  c.splits.seed = derive_seed(s, 0x5e);
  return c;
}

void to_json(json& j, const RunConfig& c) {
  json schema = json::object();
  for (const auto& [name, kind] : c.schema) schema[name] = kind == ColumnKind::numeric ? "numeric" : "categorical";
  j = json{{"input", c.input ? json(*c.input) : json(nullptr)},
           {"synthetic", c.synthetic ? json(*c.synthetic) : json(nullptr)},
           {"target", c.target},
           {"schema", schema},
           {"bins", c.bins},
           {"k_min", c.k_min},
           {"k_max", c.k_max},
           {"backend", to_string(c.backend)},
           {"solver", c.solver},
           {"svr", c.svr},
           {"splits", {{"count", c.splits.count}, {"test_ratio", c.splits.test_ratio}}},
           {"selection_file", c.selection_file ? json(*c.selection_file) : json(nullptr)},
           {"output_dir", c.output_dir},
           {"seed", c.seed ? json(*c.seed) : json(nullptr)}};
}

void from_json(const json& j, RunConfig& c) {
  auto opt_string = [&](const char* key, std::optional<std::string>& out) {
    if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<std::string>();
  };
  opt_string("input", c.input);
  opt_string("selection_file", c.selection_file);
  if (j.contains("synthetic") && !j.at("synthetic").is_null()) c.synthetic = j.at("synthetic").get<SyntheticProfile>();
  if (j.contains("target")) c.target = j.at("target").get<std::string>();
  if (j.contains("schema"))
    for (const auto& [name, kind] : j.at("schema").items()) {
      const auto k = kind.get<std::string>();
      if (k != "numeric" && k != "categorical") throw InputError("schema: unknown column kind '" + k + "'");
      c.schema[name] = k == "numeric" ? ColumnKind::numeric : ColumnKind::categorical;
    }
  if (j.contains("bins")) c.bins = j.at("bins").get<int>();
  if (j.contains("k_min")) c.k_min = j.at("k_min").get<int>();
  if (j.contains("k_max")) c.k_max = j.at("k_max").get<int>();
  if (j.contains("backend")) c.backend = parse_backend(j.at("backend").get<std::string>());
  if (j.contains("solver")) j.at("solver").get_to(c.solver);
  if (j.contains("svr")) j.at("svr").get_to(c.svr);
  if (j.contains("splits")) j.at("splits").get_to(c.splits);
  if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
  // A profile without its own seed follows the master seed.
  if (c.synthetic && c.seed && !j.at("synthetic").contains("seed")) c.synthetic->seed = *c.seed;
}

std::string config_hash(const RunConfig& c) { return hex(fnv1a(json(c).dump())); }

PreparedData prepare_data(const RunConfig& c) {
  c.validate();
  Dataset d;
  if (c.input) {
    CsvOptions options;
    options.schema = c.schema;
    d = load_csv(*c.input, c.target, options);
  } else {
    d = generate_synthetic(*c.synthetic);
  }
  PreparedData p;
  p.encoded = one_hot_encode(d);
  if (p.encoded.n_features() < 1) throw InputError("dataset has no feature columns");
  p.table = discretize(p.encoded, c.bins);
  return p;
}

StageOutput cmd_mi_rank(const RunConfig& c) {
  const auto data = prepare_data(c);
  const MiReport report = mi_report(data.table, data.encoded.feature_names);
  const fs::path dir = c.output_dir;
  StageOutput out;
  out.files.push_back(write_file(dir, "mi_report.json", dump(report)));
  std::ostringstream csv;
  write_mi_report_csv(csv, report);
  out.files.push_back(write_file(dir, "mi_report.csv", csv.str()));

  std::vector<std::string> labels;
  std::vector<double> values;
  for (auto i : report.ranking()) {
    labels.push_back(report.feature_names[i]);
    values.push_back(report.mi(static_cast<Eigen::Index>(i)));
  }
  out.files.push_back(write_file(
      dir, "mi_rank.svg", svg::bar_chart(labels, values, "Mutual information with " + c.target, "MI [nats]")));
  return out;
}

StageOutput cmd_select(const RunConfig& config) {
  const RunConfig c = config.with_derived_seeds();
  const auto data = prepare_data(c);
  const auto n = static_cast<std::size_t>(data.encoded.n_features());
  const std::size_t k_max = resolved_k_max(c, n);
  const auto& names = data.encoded.feature_names;

  const MiReport report = mi_report(data.table, names);
  const CmiTensor tensor = cmi_tensor(data.table, names);
  const QuboProblem qubo = build_miqubo(tensor);

  SelectionMatrix mi{"MI", std::vector<std::vector<std::size_t>>(k_max)};
  SelectionMatrix cmi{"CMI", std::vector<std::vector<std::size_t>>(k_max)};
  json per_k = json::array();
  json stats = json::array();
  for (std::size_t k = static_cast<std::size_t>(c.k_min); k <= k_max; ++k) {
    mi.rows[k - 1] = mi_selection(report, k);
    json entry{{"k", k}, {"mi_indices", mi.rows[k - 1]}};
    try {
      const Selection s = select_features(tensor, static_cast<int>(k), c.backend, c.solver);
      cmi.rows[k - 1] = s.indices;
      json features = json::array();
      for (auto i : s.indices) features.push_back(names[i]);
      entry["cmi_indices"] = s.indices;
      entry["cmi_features"] = features;
      entry["objective"] = s.objective;
      entry["penalty_strength"] = s.qubo.penalty_strength;
      entry["mi_objective"] = selection_objective(tensor, mi.rows[k - 1]);
      entry["status"] = "ok";
      json st = solver_result_json(s.result);
      st["k"] = k;
      st.erase("samples");
      stats.push_back(st);
    } catch (const InfeasibleError& e) {
      entry["status"] = "infeasible";
      entry["error"] = e.what();
    }
    per_k.push_back(entry);
  }
  const auto divergence = selection_divergence(mi, cmi);
  for (auto& entry : per_k) {
    const auto k = entry.at("k").get<std::size_t>();
    if (entry.at("status") == "ok") entry["divergence"] = divergence[k - 1];
  }

  const fs::path dir = c.output_dir;
  StageOutput out;
  json selection{{"backend", to_string(c.backend)},
                 {"feature_names", names},
                 {"k_min", c.k_min},
                 {"k_max", k_max},
                 {"per_k", per_k},
                 {"mi", mi},
                 {"cmi", cmi}};
  out.files.push_back(write_file(dir, "selection.json", dump(selection)));
  std::ostringstream csv;
  write_selection_csv(csv, {mi, cmi}, names);
  out.files.push_back(write_file(dir, "selection_matrix.csv", csv.str()));
  out.files.push_back(write_file(dir, "qubo.json", dump(qubo)));
  out.files.push_back(write_file(dir, "solver_stats.json", dump(json{{"backend", to_string(c.backend)}, {"per_k", stats}})));
  std::ostringstream cmi_csv;
  write_cmi_tensor_csv(cmi_csv, tensor);
  out.files.push_back(write_file(dir, "cmi_tensor.csv", cmi_csv.str()));
  return out;
}

StageOutput cmd_evaluate(const RunConfig& config) {
  const RunConfig c = config.with_derived_seeds();
  const auto data = prepare_data(c);
  const fs::path dir = c.output_dir;

  Selections sel;
  const fs::path default_selection = dir / "selection.json";
  if (c.selection_file) {
    sel = read_selection_file(*c.selection_file);
  } else if (fs::exists(default_selection)) {
    sel = read_selection_file(default_selection);
  } else {
    cmd_select(config);
    sel = read_selection_file(default_selection);
  }
  for (const auto* m : {&sel.mi, &sel.cmi})
    for (const auto& row : m->rows)
      for (auto idx : row)
        if (idx >= static_cast<std::size_t>(data.encoded.n_features()))
          throw InputError("selection index " + std::to_string(idx) + " out of range for this dataset");

  const R2Sweep sweep = r2_sweep(data.encoded, {sel.mi, sel.cmi}, c.splits, c.svr);

  StageOutput out;
  std::ostringstream csv;
  write_r2_sweep_csv(csv, sweep);
  out.files.push_back(write_file(dir, "r2_sweep.csv", csv.str()));
  out.files.push_back(write_file(dir, "r2_sweep.json", dump(sweep)));

  std::vector<svg::Series> series;
  for (const std::string method : {"MI", "CMI"}) {
    svg::Series s{method, {}, {}, {}};
    for (const auto& cell : sweep.cells)
      if (cell.method == method) {
        s.x.push_back(static_cast<double>(cell.k));
        s.mean.push_back(cell.mean);
        s.spread.push_back(cell.stddev);
      }
    series.push_back(std::move(s));
  }
  out.files.push_back(write_file(dir, "r2_plot.svg",
                                 svg::line_chart(series, "Mean R2 over " + std::to_string(c.splits.count) + " splits",
                                                 "selected features k", "R2")));
  return out;
}

StageOutput cmd_pipeline(const RunConfig& c) {
  c.validate();
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);

  json stages = json::array();
  json timing = json::object();
  StageOutput all;
  std::string failure;
  std::exception_ptr error;
  const auto started = std::time(nullptr);

  auto run = [&](const char* name, auto&& fn) {
    if (!failure.empty()) {
      stages.push_back({{"stage", name}, {"status", "not_run"}});
      return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      auto out = fn();
      all.files.insert(all.files.end(), out.files.begin(), out.files.end());
      stages.push_back({{"stage", name}, {"status", "completed"}});
    } catch (const std::exception& e) {
      failure = e.what();
      error = std::current_exception();
      stages.push_back({{"stage", name}, {"status", "failed"}, {"error", failure}});
    }
    timing[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  run("mi-rank", [&] { return cmd_mi_rank(c); });
  run("select", [&] { return cmd_select(c); });
  run("evaluate", [&] {
    RunConfig e = c;
    e.selection_file = (dir / "selection.json").string();
    return cmd_evaluate(e);
  });

  json inventory = json::array();
  for (const auto& f : all.files) {
    std::ifstream in(f, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    inventory.push_back({{"file", f.filename().string()}, {"bytes", ss.str().size()}, {"fnv1a", hex(fnv1a(ss.str()))}});
  }
  const RunConfig derived = c.with_derived_seeds();
  json manifest{{"tool", "miqubo"},
                {"version", tool_version},
                {"config", c},
                {"config_hash", config_hash(c)},
                {"seeds",
                 {{"master", *c.seed},
                  {"sa", derived.solver.sa.seed},
                  {"tabu", derived.solver.tabu.seed},
                  {"hybrid", derived.solver.hybrid.seed},
                  {"splits", derived.splits.seed}}},
                {"stages", stages},
                {"complete", failure.empty()},
                {"files", inventory},
                {"timestamps", {{"started", static_cast<long long>(started)},
                                {"finished", static_cast<long long>(std::time(nullptr))}}},
                {"timing", timing}};
  all.files.push_back(write_file(dir, "manifest.json", dump(manifest)));
  if (error) std::rethrow_exception(error);
  return all;
}

StageOutput cmd_synth(const RunConfig& c, const fs::path& path) {
  if (!c.synthetic) throw InputError("synth: a synthetic profile is required");
  const Dataset d = generate_synthetic(*c.synthetic);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_csv(out, d);
  return {{path}};
}

}  // namespace miqubo
