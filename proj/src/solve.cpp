#include "miqubo/solve.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <future>
#include <map>
#include <numeric>

#include "miqubo/error.hpp"
#include "miqubo/random.hpp"

namespace miqubo {

namespace {

constexpr double tie_tolerance = 1e-12;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// True when (ea, a) should replace the incumbent (eb, b): lower energy, or an
// energy tie within tolerance and a lexicographically smaller bitstring.
bool better(double ea, const Bitstring& a, double eb, const Bitstring& b) {
  if (ea < eb - tie_tolerance) return true;
  if (ea > eb + tie_tolerance) return false;
  return a < b;
}

bool is_feasible(const QuboProblem& q, const Bitstring& x) {
  return !q.k || x.weight() == static_cast<std::size_t>(*q.k);
}

Bitstring random_bits(Rng& rng, std::size_t n) {
  Bitstring x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>(rng.next() >> 63);
  return x;
}

// Collapses duplicates, recomputes energies exactly and orders the samples.
SolverResult finish(const QuboProblem& q, std::vector<Bitstring> states, SolverStats stats) {
  std::map<Bitstring, std::size_t> counts;
  for (auto& s : states) ++counts[s];
  SolverResult r;
  for (auto& [bits, count] : counts) r.samples.push_back({bits, energy(q, bits), count});
  std::sort(r.samples.begin(), r.samples.end(), [](const Sample& a, const Sample& b) {
    if (a.energy != b.energy) return a.energy < b.energy;
    return a.bits < b.bits;
  });
  // Exact energies can differ by round-off only; apply the shared tie rule.
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.samples.size(); ++i)
    if (better(r.samples[i].energy, r.samples[i].bits, r.samples[best].energy,
               r.samples[best].bits))
      best = i;
  r.best = r.samples[best].bits;
  r.best_energy = r.samples[best].energy;
  r.feasible = is_feasible(q, r.best);
  r.stats = std::move(stats);
  return r;
}

struct Neighbors {
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;

  explicit Neighbors(const QuboProblem& q) : adj(static_cast<std::size_t>(q.size())) {
    const Eigen::Index n = q.size();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j)
        if (const double v = q.quadratic(i, j); v != 0.0) {
          adj[static_cast<std::size_t>(i)].emplace_back(static_cast<std::size_t>(j), v);
          adj[static_cast<std::size_t>(j)].emplace_back(static_cast<std::size_t>(i), v);
        }
  }
};

// Local fields h_i = sum_j q_ij x_j.
Eigen::VectorXd local_fields(const Neighbors& nb, const Bitstring& x) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i])
      for (auto [j, v] : nb.adj[i]) h(static_cast<Eigen::Index>(j)) += v;
  return h;
}

SolverResult run_sa(const QuboProblem& q, const AnnealSchedule& s, const Bitstring* start) {
  s.validate();
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(q.size());
  const Neighbors nb(q);
  SolverStats stats;
  std::vector<Bitstring> finals;

  std::vector<double> betas(static_cast<std::size_t>(s.sweeps));
  const double ratio = s.beta_end / s.beta_start;
  for (int t = 0; t < s.sweeps; ++t)
    betas[static_cast<std::size_t>(t)] =
        s.sweeps == 1 ? s.beta_end
                      : s.beta_start * std::pow(ratio, static_cast<double>(t) / (s.sweeps - 1));

  std::vector<std::size_t> order(n);
  for (int restart = 0; restart < s.restarts; ++restart) {
    Rng rng(derive_seed(s.seed, 0x5a, static_cast<std::uint64_t>(restart)));
    Bitstring x = (restart == 0 && start) ? *start : random_bits(rng, n);
    Eigen::VectorXd h = local_fields(nb, x);
    double e = energy(q, x);
    Bitstring best = x;
    double best_e = e;

    std::iota(order.begin(), order.end(), std::size_t{0});
    for (double beta : betas) {
      rng.shuffle(order.begin(), order.end());
      for (std::size_t i : order) {
        const auto ii = static_cast<Eigen::Index>(i);
        const double delta = (x[i] ? -1.0 : 1.0) * (q.linear(ii) + h(ii));
        ++stats.iterations;
        if (delta > 0.0 && rng.uniform() >= std::exp(-beta * delta)) continue;
        x.flip(i);
        e += delta;
        ++stats.moves_accepted;
        const double sign = x[i] ? 1.0 : -1.0;
        for (auto [j, v] : nb.adj[i]) h(static_cast<Eigen::Index>(j)) += sign * v;
        if (e < best_e - tie_tolerance) {
          best = x;
          best_e = e;
        }
      }
    }
    finals.push_back(std::move(best));
    ++stats.restarts;
  }
  stats.wall_time = seconds_since(t0);
  return finish(q, std::move(finals), std::move(stats));
}

int default_tenure(std::size_t n) {
  return std::min(20, std::max(1, static_cast<int>(n / 4)));
}

SolverResult run_tabu(const QuboProblem& q, const TabuParams& p, const Bitstring* start) {
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(q.size());
  const int tenure = p.tenure.value_or(default_tenure(n));
  if (tenure < 1) throw InputError("tabu: tenure must be >= 1");
  if (p.restarts < 1) throw InputError("tabu: restarts must be >= 1");
  const int max_iterations =
      p.max_iterations > 0 ? p.max_iterations : std::max(100, 50 * static_cast<int>(n));

  SolverStats stats;
  std::vector<Bitstring> finals;
  TabuWalker walker(q, tenure);
  Rng rng(derive_seed(p.seed, 0x7a));
  Bitstring global_best;
  double global_best_e = 0.0;

  for (int restart = 0; restart < p.restarts; ++restart) {
    Bitstring x;
    if (restart == 0) {
      x = start ? *start : random_bits(rng, n);
    } else {
      // Perturb the best-known solution by a handful of random flips.
      x = global_best;
      const std::size_t flips = std::max<std::size_t>(1, n / 4);
      for (std::size_t f = 0; f < flips; ++f) x.flip(rng.below(n));
    }
    walker.reset(x);
    for (int it = 0; it < max_iterations; ++it) {
      if (!walker.step()) break;
      ++stats.moves_accepted;
    }
    stats.iterations += walker.iteration();
    ++stats.restarts;
    if (restart == 0 ||
        better(walker.best_energy(), walker.best(), global_best_e, global_best)) {
      global_best = walker.best();
      global_best_e = walker.best_energy();
    }
    finals.push_back(walker.best());
  }
  stats.wall_time = seconds_since(t0);
  return finish(q, std::move(finals), std::move(stats));
}

}  // namespace

void AnnealSchedule::validate() const {
  if (sweeps < 1) throw InputError("anneal schedule: sweeps must be >= 1");
  if (restarts < 1) throw InputError("anneal schedule: restarts must be >= 1");
  if (!(beta_start > 0.0) || !(beta_end >= beta_start))
    throw InputError("anneal schedule: need beta_end >= beta_start > 0");
}

SolverResult solve_exhaustive(const QuboProblem& q, const ExhaustiveOptions& options) {
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(q.size());
  if (n > static_cast<std::size_t>(exhaustive_max_variables))
    throw InputError("exhaustive solver: n = " + std::to_string(n) + " exceeds the cap of " +
                     std::to_string(exhaustive_max_variables));
  SolverStats stats;
  Bitstring best(n);
  double best_e = 0.0;

  if (options.weight_filter && q.k) {
    const auto k = static_cast<std::size_t>(*q.k);
    // Lexicographically largest weight-k string first, then descending.
    Bitstring x(n);
    std::fill(x.bits.begin(), x.bits.begin() + static_cast<std::ptrdiff_t>(k), 1);
    bool first = true;
    do {
      const double e = energy(q, x);
      ++stats.iterations;
      if (first || better(e, x, best_e, best)) {
        best = x;
        best_e = e;
        first = false;
      }
    } while (std::prev_permutation(x.bits.begin(), x.bits.end()));
  } else {
    // Gray-code walk with incremental local fields; exact resync keeps the
    // accumulated round-off far below the tie tolerance.
    const Neighbors nb(q);
    Bitstring x(n);
    Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    double e = 0.0;
    best_e = 0.0;
    stats.iterations = 1;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 1; step < total; ++step) {
      const auto i = static_cast<std::size_t>(std::countr_zero(step));
      const auto ii = static_cast<Eigen::Index>(i);
      e += (x[i] ? -1.0 : 1.0) * (q.linear(ii) + h(ii));
      x.flip(i);
      const double sign = x[i] ? 1.0 : -1.0;
      for (auto [j, v] : nb.adj[i]) h(static_cast<Eigen::Index>(j)) += sign * v;
      if ((step & 0xfff) == 0) e = energy(q, x);
      ++stats.iterations;
      if (better(e, x, best_e, best)) {
        best = x;
        best_e = e;
      }
    }
  }
  stats.restarts = 1;
  stats.wall_time = seconds_since(t0);
  return finish(q, {best}, std::move(stats));
}

SolverResult solve_sa(const QuboProblem& q, const AnnealSchedule& schedule) {
  return run_sa(q, schedule, nullptr);
}

SolverResult solve_tabu(const QuboProblem& q, const TabuParams& params) {
  return run_tabu(q, params, nullptr);
}

// ---------------------------------------------------------------------------

TabuWalker::TabuWalker(const QuboProblem& q, int tenure)
    : q_(q),
      couplings_(q.symmetric_couplings()),
      tenure_(static_cast<std::size_t>(std::max(tenure, 1))) {}

void TabuWalker::reset(const Bitstring& start) {
  const auto n = static_cast<std::size_t>(q_.size());
  if (start.size() != n) throw std::invalid_argument("TabuWalker: start length mismatch");
  state_ = start;
  energy_ = miqubo::energy(q_, state_);
  best_ = state_;
  best_energy_ = energy_;
  iteration_ = 0;
  tabu_until_.assign(n, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i)) = state_[i];
  const Eigen::VectorXd field = q_.linear + couplings_ * x;
  delta_.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    delta_(static_cast<Eigen::Index>(i)) = (state_[i] ? -1.0 : 1.0) * field(static_cast<Eigen::Index>(i));
}

void TabuWalker::make_tabu(std::size_t variable, std::size_t for_iterations) {
  tabu_until_.at(variable) = iteration_ + for_iterations;
}

bool TabuWalker::is_tabu(std::size_t variable) const { return iteration_ < tabu_until_.at(variable); }

void TabuWalker::apply_flip(std::size_t i) {
  const auto ii = static_cast<Eigen::Index>(i);
  energy_ += delta_(ii);
  state_.flip(i);
  delta_(ii) = -delta_(ii);
  const double sign = state_[i] ? 1.0 : -1.0;
  for (Eigen::Index j = 0; j < couplings_.rows(); ++j) {
    if (j == ii) continue;
    const double v = couplings_(j, ii);
    if (v == 0.0) continue;
    // Flipping i shifts j's field by sign * v; the flip direction of j
    // decides whether that raises or lowers its move delta.
    delta_(j) += (state_[static_cast<std::size_t>(j)] ? -1.0 : 1.0) * sign * v;
  }
}

std::optional<std::size_t> TabuWalker::step() {
  std::optional<std::size_t> choice;
  double choice_delta = 0.0;
  for (std::size_t i = 0; i < state_.size(); ++i) {
    const double d = delta_(static_cast<Eigen::Index>(i));
    const bool aspirates = energy_ + d < best_energy_ - tie_tolerance;
    if (is_tabu(i) && !aspirates) continue;
    if (!choice || d < choice_delta) {
      choice = i;
      choice_delta = d;
    }
  }
  if (!choice) return std::nullopt;
  apply_flip(*choice);
  tabu_until_[*choice] = iteration_ + 1 + tenure_;
  ++iteration_;
  if (better(energy_, state_, best_energy_, best_)) {
    best_ = state_;
    best_energy_ = energy_;
  }
  return choice;
}

// ---------------------------------------------------------------------------

Bitstring sample_subproblem(const QuboProblem& q, const Bitstring& current, int subset_size,
                            std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(q.size());
  if (current.size() != n) throw std::invalid_argument("sample_subproblem: length mismatch");
  const int cap = static_cast<int>(std::min<std::size_t>(n, exhaustive_max_variables));
  if (subset_size < 1 || subset_size > cap)
    throw InputError("sample_subproblem: subset_size must lie in [1, " + std::to_string(cap) + "]");

  const Eigen::MatrixXd j = q.symmetric_couplings();
  const Eigen::VectorXd strength = j.cwiseAbs().rowwise().sum();

  // Seeded shuffle first so equal-strength variables are picked at random.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, 0x5b));
  rng.shuffle(order.begin(), order.end());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return strength(static_cast<Eigen::Index>(a)) > strength(static_cast<Eigen::Index>(b));
  });
  std::vector<std::size_t> subset(order.begin(), order.begin() + subset_size);
  std::sort(subset.begin(), subset.end());

  const auto m = subset.size();
  std::vector<bool> inside(n, false);
  for (auto v : subset) inside[v] = true;

  // Clamped problem: boundary fields from the fixed variables.
  QuboProblem sub(static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const auto va = static_cast<Eigen::Index>(subset[a]);
    double field = q.linear(va);
    for (std::size_t v = 0; v < n; ++v)
      if (!inside[v] && current[v]) field += j(va, static_cast<Eigen::Index>(v));
    sub.linear(static_cast<Eigen::Index>(a)) = field;
    for (std::size_t b = a + 1; b < m; ++b)
      sub.quadratic(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          j(va, static_cast<Eigen::Index>(subset[b]));
  }

  Bitstring local(m);
  for (std::size_t a = 0; a < m; ++a) local[a] = current[subset[a]];
  const double current_e = energy(sub, local);
  const SolverResult r = solve_exhaustive(sub);
  if (!(r.best_energy < current_e - tie_tolerance)) return current;

  Bitstring out = current;
  for (std::size_t a = 0; a < m; ++a) out[subset[a]] = r.best[a];
  return out;
}

SolverResult solve_hybrid(const QuboProblem& q, const HybridConfig& config) {
  if (config.rounds < 1) throw InputError("hybrid: rounds must be >= 1");
  config.sa.validate();
  const auto t0 = Clock::now();
  const auto n = static_cast<std::size_t>(q.size());
  const int subset =
      std::min(config.subproblem_size, static_cast<int>(std::min<std::size_t>(n, exhaustive_max_variables)));

  Rng init_rng(derive_seed(config.seed, 0x1));
  Bitstring incumbent = random_bits(init_rng, n);
  double incumbent_e = energy(q, incumbent);

  SolverStats stats;
  std::vector<Bitstring> pool{incumbent};

  for (int round = 0; round < config.rounds; ++round) {
    const auto r = static_cast<std::uint64_t>(round);
    AnnealSchedule sa = config.sa;
    sa.seed = derive_seed(config.seed, 1, r);
    TabuParams tabu = config.tabu;
    tabu.seed = derive_seed(config.seed, 2, r);
    const std::uint64_t sub_seed = derive_seed(config.seed, 3, r);

    // Legs only read q and their own copy of the incumbent.
    auto sa_leg = std::async(std::launch::async, [&, sa, start = incumbent] {
      return run_sa(q, sa, &start);
    });
    auto tabu_leg = std::async(std::launch::async, [&, tabu, start = incumbent] {
      return run_tabu(q, tabu, &start);
    });
    auto sub_leg = std::async(std::launch::async, [&, sub_seed, start = incumbent] {
      return sample_subproblem(q, start, subset, sub_seed);
    });
    SolverResult sa_result = sa_leg.get();
    SolverResult tabu_result = tabu_leg.get();
    const Bitstring sub_result = sub_leg.get();

    stats.iterations += sa_result.stats.iterations + tabu_result.stats.iterations + 1;
    stats.moves_accepted += sa_result.stats.moves_accepted + tabu_result.stats.moves_accepted;
    ++stats.restarts;

    // Fixed combination order; the min with lexicographic ties does not
    // depend on which leg finished first.
    bool improved = false;
    auto consider = [&](const Bitstring& candidate) {
      const double e = energy(q, candidate);
      if (better(e, candidate, incumbent_e, incumbent)) {
        improved = improved || e < incumbent_e - tie_tolerance;
        incumbent = candidate;
        incumbent_e = e;
      }
    };
    for (const auto& s : sa_result.samples) {
      pool.push_back(s.bits);
      consider(s.bits);
    }
    for (const auto& s : tabu_result.samples) {
      pool.push_back(s.bits);
      consider(s.bits);
    }
    pool.push_back(sub_result);
    consider(sub_result);
    stats.energy_trace.push_back(incumbent_e);
    if (!improved) break;
  }
  stats.wall_time = seconds_since(t0);
  SolverResult result = finish(q, std::move(pool), std::move(stats));
  return result;
}

// ---------------------------------------------------------------------------

Backend parse_backend(const std::string& name) {
  if (name == "exhaustive") return Backend::exhaustive;
  if (name == "sa") return Backend::sa;
  if (name == "tabu") return Backend::tabu;
  if (name == "hybrid") return Backend::hybrid;
  throw InputError("unknown backend '" + name + "' (expected exhaustive|sa|tabu|hybrid)");
}

std::string to_string(Backend backend) {
  switch (backend) {
    case Backend::exhaustive: return "exhaustive";
    case Backend::sa: return "sa";
    case Backend::tabu: return "tabu";
    case Backend::hybrid: return "hybrid";
  }
  return "unknown";
}

SolverResult solve(const QuboProblem& q, Backend backend, const SolverConfig& config) {
  switch (backend) {
    case Backend::exhaustive: return solve_exhaustive(q, config.exhaustive);
    case Backend::sa: return solve_sa(q, config.sa);
    case Backend::tabu: return solve_tabu(q, config.tabu);
    case Backend::hybrid: return solve_hybrid(q, config.hybrid);
  }
  throw std::logic_error("unhandled backend");
}

double selection_objective(const CmiTensor& c, const std::vector<std::size_t>& indices) {
  double total = 0.0;
  for (auto i : indices) {
    total += c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    for (auto j : indices)
      if (j != i) total += c.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return total;
}

Selection select_features(const CmiTensor& c, int k, Backend backend, const SolverConfig& config) {
  const QuboProblem base = build_miqubo(c);
  Selection s;
  s.qubo = with_cardinality(base, k, config.penalty);
  s.result = solve(s.qubo, backend, config);

  const Sample* chosen = nullptr;
  for (const auto& sample : s.result.samples) {
    if (sample.bits.weight() != static_cast<std::size_t>(k)) continue;
    if (!chosen || better(sample.energy, sample.bits, chosen->energy, chosen->bits)) chosen = &sample;
  }
  if (!chosen)
    throw InfeasibleError("select_features: no weight-" + std::to_string(k) +
                          " sample found; retry with a larger budget");
  // Selections that tie within tolerance prefer lower feature indices: swap a
  // selected feature for a lower unselected one while the energy holds.
  Bitstring x = chosen->bits;
  double e = energy(base, x);
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t i = 0; i < x.size() && !moved; ++i) {
      if (!x[i]) continue;
      for (std::size_t j = 0; j < i && !moved; ++j) {
        if (x[j]) continue;
        Bitstring y = x;
        y[i] = 0;
        y[j] = 1;
        const double ey = energy(base, y);
        if (ey <= e + tie_tolerance) {
          x = std::move(y);
          e = std::min(e, ey);
          moved = true;
        }
      }
    }
  }
  s.indices = x.ones();
  s.objective = -energy(base, x);
  return s;
}

}  // namespace miqubo
