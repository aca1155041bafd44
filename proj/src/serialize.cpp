#include "miqubo/serialize.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "miqubo/error.hpp"

namespace miqubo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

template <typename T>
void read_optional(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) j.at(key).get_to(out);
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Eigen::VectorXd vector_from(const json& a) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a.at(i).get<double>();
  return v;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

void to_json(json& j, const CategoricalSpec& c) {
  j = json{{"name", c.name}, {"n_categories", c.n_categories}, {"informative", c.informative}};
}

void from_json(const json& j, CategoricalSpec& c) {
  if (j.is_number_integer()) {
    c.n_categories = j.get<int>();
    return;
  }
  read_optional(j, "name", c.name);
  read_optional(j, "n_categories", c.n_categories);
  read_optional(j, "informative", c.informative);
}

void to_json(json& j, const SyntheticProfile& p) {
  j = json{{"n_samples", p.n_samples},
           {"n_informative", p.n_informative},
           {"n_redundant", p.n_redundant},
           {"n_noise", p.n_noise},
           {"categorical_spec", p.categorical_spec},
           {"mi_concentration", p.mi_concentration == MiConcentration::high ? "high" : "low"},
           {"seed", p.seed}};
}

void from_json(const json& j, SyntheticProfile& p) {
  read_optional(j, "n_samples", p.n_samples);
  read_optional(j, "n_informative", p.n_informative);
  read_optional(j, "n_redundant", p.n_redundant);
  read_optional(j, "n_noise", p.n_noise);
  read_optional(j, "categorical_spec", p.categorical_spec);
  read_optional(j, "seed", p.seed);
  if (j.contains("mi_concentration")) {
    const auto s = j.at("mi_concentration").get<std::string>();
    if (s == "high")
      p.mi_concentration = MiConcentration::high;
    else if (s == "low")
      p.mi_concentration = MiConcentration::low;
    else
      throw InputError("synthetic profile: mi_concentration must be 'high' or 'low'");
  }
}

void to_json(json& j, const MiReport& r) {
  json ranking = json::array();
  for (auto i : r.ranking()) ranking.push_back(i);
  j = json{{"units", "nats"},
           {"feature_names", r.feature_names},
           {"mi", vector_json(r.mi)},
           {"total_mi", r.total_mi},
           {"concentration", r.concentration},
           {"ranking", ranking}};
}

void to_json(json& j, const CmiTensor& c) {
  json values = json::array();
  for (Eigen::Index r = 0; r < c.values.rows(); ++r)
    for (Eigen::Index col = 0; col < c.values.cols(); ++col) values.push_back(c.values(r, col));
  j = json{{"units", "nats"}, {"n", c.size()}, {"feature_names", c.feature_names}, {"values", values}};
}

void from_json(const json& j, CmiTensor& c) {
  const auto n = j.at("n").get<Eigen::Index>();
  read_optional(j, "feature_names", c.feature_names);
  const auto& values = j.at("values");
  if (values.size() != static_cast<std::size_t>(n * n)) throw InputError("cmi tensor: expected n*n values");
  c.values.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index col = 0; col < n; ++col) c.values(r, col) = values.at(static_cast<std::size_t>(r * n + col)).get<double>();
}

void to_json(json& j, const QuboProblem& q) {
  json quad = json::array();
  for (Eigen::Index i = 0; i < q.size(); ++i)
    for (Eigen::Index k = i + 1; k < q.size(); ++k)
      if (q.quadratic(i, k) != 0.0) quad.push_back(json::array({i, k, q.quadratic(i, k)}));
  j = json{{"n", q.size()},
           {"linear", vector_json(q.linear)},
           {"quadratic", quad},
           {"offset", q.offset},
           {"labels", q.labels}};
  if (q.k) {
    j["k"] = *q.k;
    j["penalty_strength"] = q.penalty_strength;
  }
}

void from_json(const json& j, QuboProblem& q) {
  const auto n = j.at("n").get<Eigen::Index>();
  if (n < 0) throw InputError("qubo json: negative n");
  q = QuboProblem(n);
  if (j.at("linear").size() != static_cast<std::size_t>(n)) throw InputError("qubo json: linear length != n");
  q.linear = vector_from(j.at("linear"));
  for (const auto& t : j.at("quadratic")) {
    const auto a = t.at(0).get<Eigen::Index>();
    const auto b = t.at(1).get<Eigen::Index>();
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) throw InputError("qubo json: bad coupler index");
    q.quadratic(std::min(a, b), std::max(a, b)) += t.at(2).get<double>();
  }
  read_optional(j, "offset", q.offset);
  read_optional(j, "labels", q.labels);
  if (j.contains("k") && !j.at("k").is_null()) q.k = j.at("k").get<int>();
  read_optional(j, "penalty_strength", q.penalty_strength);
  q.validate();
}

json solver_result_json(const SolverResult& r, bool include_timing) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"bits", s.bits.to_string()}, {"energy", s.energy}, {"multiplicity", s.multiplicity}});
  json stats{{"iterations", r.stats.iterations},
             {"restarts", r.stats.restarts},
             {"moves_accepted", r.stats.moves_accepted}};
  if (!r.stats.energy_trace.empty()) stats["energy_trace"] = r.stats.energy_trace;
  if (include_timing) stats["wall_time"] = r.stats.wall_time;
  return json{{"best", r.best.to_string()},
              {"best_energy", r.best_energy},
              {"feasible", r.feasible},
              {"samples", samples},
              {"stats", stats}};
}

void from_json(const json& j, SolverResult& r) {
  r.best = Bitstring::from_string(j.at("best").get<std::string>());
  r.best_energy = j.at("best_energy").get<double>();
  r.feasible = j.at("feasible").get<bool>();
  r.samples.clear();
  for (const auto& s : j.at("samples"))
    r.samples.push_back({Bitstring::from_string(s.at("bits").get<std::string>()), s.at("energy").get<double>(),
                         s.at("multiplicity").get<std::size_t>()});
  const auto& st = j.at("stats");
  read_optional(st, "iterations", r.stats.iterations);
  read_optional(st, "restarts", r.stats.restarts);
  read_optional(st, "moves_accepted", r.stats.moves_accepted);
  read_optional(st, "wall_time", r.stats.wall_time);
  read_optional(st, "energy_trace", r.stats.energy_trace);
}

void to_json(json& j, const KernelParams& p) {
  j = json{{"kind", p.kind == KernelKind::rbf ? "rbf" : "linear"}, {"gamma", p.gamma}};
}

void from_json(const json& j, KernelParams& p) {
  if (j.contains("kind")) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "rbf")
      p.kind = KernelKind::rbf;
    else if (kind == "linear")
      p.kind = KernelKind::linear;
    else
      throw InputError("kernel kind must be 'rbf' or 'linear'");
  }
  read_optional(j, "gamma", p.gamma);
}

void to_json(json& j, const SvrModel& m) {
  json support = json::array();
  for (Eigen::Index r = 0; r < m.support_inputs.rows(); ++r)
    support.push_back(vector_json(m.support_inputs.row(r).transpose()));
  j = json{{"kernel", m.params},
           {"C", m.C},
           {"epsilon", m.epsilon},
           {"bias", m.bias},
           {"input_dim", m.support_inputs.cols()},
           {"dual_coefs", vector_json(m.dual_coefs)},
           {"support_inputs", support}};
}

void from_json(const json& j, SvrModel& m) {
  j.at("kernel").get_to(m.params);
  m.C = j.at("C").get<double>();
  m.epsilon = j.at("epsilon").get<double>();
  m.bias = j.at("bias").get<double>();
  m.dual_coefs = vector_from(j.at("dual_coefs"));
  const auto& support = j.at("support_inputs");
  const auto dim = j.at("input_dim").get<Eigen::Index>();
  m.support_inputs.resize(static_cast<Eigen::Index>(support.size()), dim);
  for (std::size_t r = 0; r < support.size(); ++r)
    m.support_inputs.row(static_cast<Eigen::Index>(r)) = vector_from(support.at(r)).transpose();
  if (m.support_inputs.rows() != m.dual_coefs.size())
    throw InputError("svr model json: coefficient and support counts differ");
}

void to_json(json& j, const SvrParams& p) {
  j = json{{"C", p.C}, {"epsilon", p.epsilon}, {"kernel", p.kernel}, {"tol", p.tol},
           {"max_iterations", p.max_iterations}};
}

void from_json(const json& j, SvrParams& p) {
  read_optional(j, "C", p.C);
  read_optional(j, "epsilon", p.epsilon);
  read_optional(j, "kernel", p.kernel);
  read_optional(j, "tol", p.tol);
  read_optional(j, "max_iterations", p.max_iterations);
}

void to_json(json& j, const SelectionMatrix& s) {
  json rows = json::array();
  for (std::size_t r = 0; r < s.rows.size(); ++r) rows.push_back({{"k", r + 1}, {"indices", s.rows[r]}});
  j = json{{"method", s.method}, {"rows", rows}};
}

void from_json(const json& j, SelectionMatrix& s) {
  s.method = j.at("method").get<std::string>();
  s.rows.clear();
  for (const auto& row : j.at("rows")) {
    const auto k = row.at("k").get<std::size_t>();
    if (k < 1) throw InputError("selection json: k must be >= 1");
    if (s.rows.size() < k) s.rows.resize(k);
    s.rows[k - 1] = row.at("indices").get<std::vector<std::size_t>>();
  }
  s.validate();
}

void to_json(json& j, const SplitConfig& s) {
  j = json{{"count", s.count}, {"test_ratio", s.test_ratio}, {"seed", s.seed}};
}

void from_json(const json& j, SplitConfig& s) {
  read_optional(j, "count", s.count);
  read_optional(j, "test_ratio", s.test_ratio);
  read_optional(j, "seed", s.seed);
}

void to_json(json& j, const R2Sweep& s) {
  json cells = json::array();
  for (const auto& c : s.cells) {
    json r2 = json::array();
    for (std::size_t i = 0; i < c.r2.size(); ++i) r2.push_back(c.skipped[i] ? json(nullptr) : json(c.r2[i]));
    cells.push_back({{"method", c.method},
                     {"k", c.k},
                     {"r2", r2},
                     {"skipped", c.skipped},
                     {"mean", c.mean},
                     {"std", c.stddev},
                     {"standard_error", c.standard_error()}});
  }
  json gaps = json::array();
  for (const auto& g : gap_summary(s))
    gaps.push_back({{"k", g.k},
                    {"gap", g.gap},
                    {"max_standard_error", g.max_standard_error},
                    {"pooled_std", g.pooled_std},
                    {"significant", g.significant}});
  j = json{{"splits", s.splits},
           {"svr", {{"gamma", s.svr.kernel.gamma}, {"C", s.svr.C}, {"epsilon", s.svr.epsilon},
                    {"kernel", s.svr.kernel.kind == KernelKind::rbf ? "rbf" : "linear"}, {"tol", s.svr.tol}}},
           {"cells", cells},
           {"gaps", gaps}};
}

void to_json(json& j, const AnnealSchedule& s) {
  j = json{{"sweeps", s.sweeps}, {"beta_start", s.beta_start}, {"beta_end", s.beta_end},
           {"restarts", s.restarts}, {"seed", s.seed}};
}

void from_json(const json& j, AnnealSchedule& s) {
  read_optional(j, "sweeps", s.sweeps);
  read_optional(j, "beta_start", s.beta_start);
  read_optional(j, "beta_end", s.beta_end);
  read_optional(j, "restarts", s.restarts);
  read_optional(j, "seed", s.seed);
}

void to_json(json& j, const TabuParams& p) {
  j = json{{"tenure", p.tenure ? json(*p.tenure) : json(nullptr)},
           {"max_iterations", p.max_iterations},
           {"restarts", p.restarts},
           {"seed", p.seed}};
}

void from_json(const json& j, TabuParams& p) {
  if (j.contains("tenure") && !j.at("tenure").is_null()) p.tenure = j.at("tenure").get<int>();
  read_optional(j, "max_iterations", p.max_iterations);
  read_optional(j, "restarts", p.restarts);
  read_optional(j, "seed", p.seed);
}

void to_json(json& j, const HybridConfig& h) {
  j = json{{"sa", h.sa}, {"tabu", h.tabu}, {"subproblem_size", h.subproblem_size},
           {"rounds", h.rounds}, {"seed", h.seed}};
}

void from_json(const json& j, HybridConfig& h) {
  read_optional(j, "sa", h.sa);
  read_optional(j, "tabu", h.tabu);
  read_optional(j, "subproblem_size", h.subproblem_size);
  read_optional(j, "rounds", h.rounds);
  read_optional(j, "seed", h.seed);
}

void to_json(json& j, const SolverConfig& c) {
  j = json{{"exhaustive_weight_filter", c.exhaustive.weight_filter},
           {"sa", c.sa},
           {"tabu", c.tabu},
           {"hybrid", c.hybrid},
           {"penalty", c.penalty ? json(*c.penalty) : json(nullptr)}};
}

void from_json(const json& j, SolverConfig& c) {
  read_optional(j, "exhaustive_weight_filter", c.exhaustive.weight_filter);
  read_optional(j, "sa", c.sa);
  read_optional(j, "tabu", c.tabu);
  read_optional(j, "hybrid", c.hybrid);
  if (j.contains("penalty") && !j.at("penalty").is_null()) c.penalty = j.at("penalty").get<double>();
}

void write_mi_report_csv(std::ostream& out, const MiReport& r) {
  out << "rank,index,feature,mi_nats\n";
  const auto order = r.ranking();
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    out << pos + 1 << ',' << order[pos] << ',' << csv_cell(r.feature_names[order[pos]]) << ','
        << format_double(r.mi(static_cast<Eigen::Index>(order[pos]))) << '\n';
}

void write_cmi_tensor_csv(std::ostream& out, const CmiTensor& c) {
  out << "given";
  for (Eigen::Index j = 0; j < c.size(); ++j)
    out << ',' << csv_cell(c.feature_names.empty() ? "x" + std::to_string(j) : c.feature_names[static_cast<std::size_t>(j)]);
  out << '\n';
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    out << csv_cell(c.feature_names.empty() ? "x" + std::to_string(i) : c.feature_names[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < c.size(); ++j) out << ',' << format_double(c.values(i, j));
    out << '\n';
  }
}

void write_selection_csv(std::ostream& out, const std::vector<SelectionMatrix>& selections,
                         const std::vector<std::string>& names) {
  out << "method,k,index,feature\n";
  for (const auto& s : selections)
    for (std::size_t r = 0; r < s.rows.size(); ++r)
      for (auto idx : s.rows[r])
        out << s.method << ',' << r + 1 << ',' << idx << ','
            << csv_cell(idx < names.size() ? names[idx] : std::string{}) << '\n';
}

void write_r2_sweep_csv(std::ostream& out, const R2Sweep& s) {
  out << "method,k,split,r2,skipped\n";
  for (const auto& c : s.cells)
    for (std::size_t i = 0; i < c.r2.size(); ++i)
      out << c.method << ',' << c.k << ',' << i << ',' << (c.skipped[i] ? "" : format_double(c.r2[i])) << ','
          << (c.skipped[i] ? 1 : 0) << '\n';
}

}  // namespace miqubo
