// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "miqubo/bench.hpp"
#include "miqubo/pipeline.hpp"
#include "support.hpp"

using namespace miqubo;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool same_energy(double a, double b) { return std::abs(a - b) <= 1e-9; }

// Energy of build_miqubo equals minus the selection objective for every
// bitstring of 200 random tensors.
Outcome qubo_objective_equivalence() {
  Rng rng(101);
  double worst = 0.0;
  std::size_t checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    const auto c = gen::random_tensor(rng, n);
    const auto q = build_miqubo(c);
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const auto x = oracle::bits_of(m, n);
      Bitstring b(n);
      std::vector<std::size_t> f;
      for (int i = 0; i < n; ++i) {
        b[i] = static_cast<std::uint8_t>(x[i]);
        if (x[i]) f.push_back(i);
      }
      worst = std::max(worst, std::abs(energy(q, b) + oracle::selection_objective(c.values, f)));
      ++checked;
    }
  }
  return {worst <= 1e-10, fmt("%zu bitstrings, max |E + objective| = %.2e (tol 1e-10)", checked, worst)};
}

Outcome heuristic_optimality() {
  Rng rng(202);
  int sa_hits = 0, tabu_hits = 0, hybrid_hits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = gen::random_qubo(rng, 12);
    const double best = oracle::brute_force(q).energy;
    const auto seed = static_cast<std::uint64_t>(trial);
    AnnealSchedule sa;
    sa.seed = seed;
    TabuParams tabu;
    tabu.seed = seed;
    HybridConfig hybrid;
    hybrid.seed = seed;
    hybrid.sa.seed = derive_seed(seed, 1);
    hybrid.tabu.seed = derive_seed(seed, 2);
    sa_hits += same_energy(solve_sa(q, sa).best_energy, best);
    tabu_hits += same_energy(solve_tabu(q, tabu).best_energy, best);
    hybrid_hits += same_energy(solve_hybrid(q, hybrid).best_energy, best);
  }
  return {sa_hits >= 95 && tabu_hits >= 95 && hybrid_hits >= 98,
          fmt("optimum found: sa %d/100 (>= 95), tabu %d/100 (>= 95), hybrid %d/100 (>= 98)", sa_hits,
              tabu_hits, hybrid_hits)};
}

Outcome cardinality_enforcement() {
  Rng rng(303);
  int good = 0;
  for (int trial = 0; trial < 100; ++trial) {
    // Half uniform random, half MIQUBO-shaped (all couplers negative).
    const auto base = trial % 2 ? gen::random_qubo(rng, 12) : build_miqubo(gen::random_tensor(rng, 12));
    const auto q = with_cardinality(base, 4);
    bool all_weight_four = true;
    for (const auto& s : oracle::brute_force(q).states)
      all_weight_four &= std::count(s.begin(), s.end(), 1) == 4;
    good += all_weight_four;
  }
  return {good == 100, fmt("%d/100 instances with every ground state at weight 4", good)};
}

Outcome information_identities() {
  Rng rng(404);
  double identity_err = 0.0, chain_err = 0.0, most_negative = 0.0, duplicate_cmi = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int nf = 1 + static_cast<int>(rng.below(4));
    const int samples = 2 + static_cast<int>(rng.below(63));
    auto t = gen::random_table(rng, nf, 6, samples);
    const double sy = entropy(joint_distribution(t, {}, true));
    most_negative = std::min(most_negative, sy);
    for (int j = 0; j < nf; ++j) {
      const double mi = mutual_information(t, j);
      most_negative = std::min({most_negative, mi, entropy(joint_distribution(t, {std::size_t(j)}, false))});
      identity_err = std::max(identity_err, std::abs(mi - (sy - conditional_target_entropy(t, j))));
      for (int i = 0; i < nf; ++i) {
        if (i == j) continue;
        const double cmi = conditional_mutual_information(t, j, i);
        most_negative = std::min(most_negative, cmi);
        chain_err = std::max(chain_err, std::abs(cmi - oracle::chain_rule_cmi(t, j, i)));
      }
    }
    if (nf >= 2) {
      t.codes.col(1) = t.codes.col(0);
      t.bin_counts[1] = t.bin_counts[0];
      duplicate_cmi = std::max(duplicate_cmi, std::abs(conditional_mutual_information(t, 1, 0)));
    }
  }
  const bool pass = identity_err <= 1e-10 && chain_err <= 1e-10 && most_negative >= -1e-12 &&
                    duplicate_cmi <= 1e-12;
  return {pass, fmt("entropy identity %.1e, chain rule %.1e (tol 1e-10); min value %.1e; duplicate CMI %.1e",
                    identity_err, chain_err, most_negative, duplicate_cmi)};
}

Outcome svr_correctness() {
  bool feasible = true;
  auto check = [&](const SvrModel& m) {
    feasible &= (m.dual_coefs.cwiseAbs().array() <= m.C + 1e-9).all();
    feasible &= std::abs(m.dual_coefs.sum()) <= 1e-6;
  };

  Eigen::MatrixXd x(20, 1);
  Eigen::VectorXd z(20);
  for (int i = 0; i < 20; ++i) {
    x(i, 0) = -1.0 + 2.0 * i / 19.0;
    z(i) = 2.0 * x(i, 0);
  }
  const auto linear = train_svr(x, z, {.C = 100.0, .epsilon = 1e-3, .kernel = {.kind = KernelKind::linear}});
  check(linear);
  const double r2_linear = r2_score(z, predict(linear, x));

  Eigen::MatrixXd raw(200, 1);
  Eigen::VectorXd s(200);
  for (int i = 0; i < 200; ++i) {
    raw(i, 0) = -std::numbers::pi + 2.0 * std::numbers::pi * i / 199.0;
    s(i) = std::sin(raw(i, 0));
  }
  const Eigen::MatrixXd xs = standardize_columns(raw);
  const auto rbf = train_svr(xs, s, {.C = 10.0, .epsilon = 1e-3, .kernel = {.kind = KernelKind::rbf, .gamma = 1.0}});
  check(rbf);
  const double r2_sin = r2_score(s, predict(rbf, xs));

  const double hand = r2_score(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 4));
  const bool pass = feasible && r2_linear >= 0.999 && r2_sin >= 0.99 && std::abs(hand - 0.5) <= 1e-15;
  return {pass, fmt("dual feasible %s; R2 linear %.6f (>= 0.999); R2 sin %.6f (>= 0.99); hand value %.3f",
                    feasible ? "yes" : "no", r2_linear, r2_sin, hand)};
}

struct Regime {
  EncodedDataset data;
  SelectionMatrix mi, cmi;
};

Regime prepare_regime(const SyntheticProfile& p, std::size_t k_max) {
  Regime r;
  r.data = one_hot_encode(generate_synthetic(p));
  const auto t = discretize(r.data, 10);
  r.mi = mi_selection_matrix(mi_report(t, r.data.feature_names), k_max);
  r.cmi = cmi_selection_matrix(cmi_tensor(t, r.data.feature_names), k_max, Backend::exhaustive, {});
  return r;
}

Outcome regime_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  SvrParams svr;  // gamma = C = 1, epsilon = 1e-3

  SyntheticProfile low;
  low.n_samples = 600;
  low.n_informative = 6;
  low.n_redundant = 4;
  low.n_noise = 4;
  low.categorical_spec = {{"site", 6, true}};
  low.mi_concentration = MiConcentration::low;
  low.seed = 1;
  const auto lr = prepare_regime(low, 5);
  const auto low_sweep = r2_sweep(lr.data, {lr.mi, lr.cmi}, {.count = 15, .seed = 7}, svr);
  std::size_t significant_k = 0;
  double best_ratio = 0.0;
  for (const auto& g : gap_summary(low_sweep)) {
    if (g.k <= 5 && g.gap > g.max_standard_error && significant_k == 0) significant_k = g.k;
    if (g.max_standard_error > 0) best_ratio = std::max(best_ratio, g.gap / g.max_standard_error);
  }
  const bool low_ok = lr.data.n_features() >= 20 && lr.data.n_samples() >= 500 && significant_k > 0;

  SyntheticProfile high;
  high.n_samples = 500;
  high.n_informative = 2;
  high.n_redundant = 0;
  high.n_noise = 5;
  high.categorical_spec = {{"site", 4, false}};
  high.mi_concentration = MiConcentration::high;
  high.seed = 1;
  const auto n_high = static_cast<std::size_t>(one_hot_encode(generate_synthetic(high)).n_features());
  const auto hr = prepare_regime(high, n_high);
  const auto high_sweep = r2_sweep(hr.data, {hr.mi, hr.cmi}, {.count = 100, .seed = 7}, svr);
  bool high_ok = true;
  double worst_ratio = 0.0;
  for (const auto& g : gap_summary(high_sweep)) {
    high_ok &= std::abs(g.gap) <= g.pooled_std;
    if (g.pooled_std > 0) worst_ratio = std::max(worst_ratio, std::abs(g.gap) / g.pooled_std);
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {low_ok && high_ok && seconds < 600.0,
          fmt("low: %ld features, first significant k = %zu, best gap/SE %.1f; high: max |gap|/pooled std "
              "%.2f over k = 1..%zu (<= 1); %.0f s (< 600)",
              static_cast<long>(lr.data.n_features()), significant_k, best_ratio, worst_ratio, n_high, seconds)};
}

Outcome selection_divergence_reproduction() {
  bool nonzero_somewhere = false;
  int both_duplicates = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = gen::duplicated_features(seed);
    const auto t = discretize(e, 10);
    const auto mi = mi_selection_matrix(mi_report(t, e.feature_names), 6);
    const auto cmi = cmi_selection_matrix(cmi_tensor(t, e.feature_names), 6, Backend::exhaustive, {});
    for (auto d : selection_divergence(mi, cmi)) nonzero_somewhere |= d > 0;
    const auto& pick = cmi.rows[1];
    both_duplicates += pick.size() == 2 && pick[0] == 0 && pick[1] == 1;
  }
  return {nonzero_somewhere && both_duplicates == 0,
          fmt("20 datasets: divergence nonzero %s; k = 2 picks with both duplicates: %d",
              nonzero_somewhere ? "yes" : "no", both_duplicates)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome pipeline_determinism() {
  const auto root = fs::temp_directory_path() / "miqubo_acceptance_determinism";
  fs::remove_all(root);
  RunConfig c;
  SyntheticProfile p;
  p.mi_concentration = MiConcentration::low;
  p.n_informative = 6;
  p.categorical_spec = {{"site", 4, true}};
  c.synthetic = p;
  c.seed = 2024;
  c.backend = Backend::hybrid;
  c.k_max = 6;
  c.splits.count = 5;
  // Same config, same output directory: the first run is moved aside.
  c.output_dir = (root / "b").string();
  cmd_pipeline(c);
  fs::rename(root / "b", root / "a");
  cmd_pipeline(c);

  std::size_t compared = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    const auto ext = name.extension();
    if (ext != ".csv" && ext != ".json") continue;
    ++compared;
    if (name == "manifest.json") {
      auto a = json::parse(slurp(root / "a" / name));
      auto b = json::parse(slurp(root / "b" / name));
      for (auto* m : {&a, &b}) {
        m->erase("timestamps");
        m->erase("timing");
      }
      differing += a != b;
    } else {
      differing += slurp(root / "a" / name) != slurp(root / "b" / name);
    }
  }
  return {compared >= 9 && differing == 0,
          fmt("%zu payload files compared, %zu differ (manifest compared without timestamps and timing)",
              compared, differing)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 QUBO/objective equivalence", qubo_objective_equivalence},
      {"2 heuristic optimality", heuristic_optimality},
      {"3 cardinality enforcement", cardinality_enforcement},
      {"4 information-theory identities", information_identities},
      {"5 SVR correctness", svr_correctness},
      {"6 regime reproduction", regime_reproduction},
      {"7 selection divergence", selection_divergence_reproduction},
      {"8 pipeline determinism", pipeline_determinism},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] criterion %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), s);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
