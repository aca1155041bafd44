#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "miqubo/qubo.hpp"

namespace miqubo {

struct Sample {
  Bitstring bits;
  double energy = 0.0;
  std::size_t multiplicity = 1;
};

struct SolverStats {
  std::size_t iterations = 0;
  std::size_t restarts = 0;
  std::size_t moves_accepted = 0;
  double wall_time = 0.0;  // seconds
  std::vector<double> energy_trace;  // hybrid: incumbent energy after each round
};

struct SolverResult {
  Bitstring best;
  double best_energy = 0.0;
  bool feasible = true;
  std::vector<Sample> samples;  // ascending energy, ties lexicographic
  SolverStats stats;
};

struct AnnealSchedule {
  int sweeps = 1000;
  double beta_start = 0.1;
  double beta_end = 10.0;
  int restarts = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TabuParams {
  std::optional<int> tenure;  // default min(20, max(1, n / 4))
  int max_iterations = 0;     // per restart; 0 selects 50 * n (at least 100)
  int restarts = 20;
  std::uint64_t seed = 0;
};

struct ExhaustiveOptions {
  /// Enumerate only weight-k strings when the problem carries a k.
  bool weight_filter = false;
};

inline constexpr int exhaustive_max_variables = 24;

struct HybridConfig {
  AnnealSchedule sa;
  TabuParams tabu;
  int subproblem_size = 16;  // clamped to min(n, 24)
  int rounds = 10;
  std::uint64_t seed = 0;
};

SolverResult solve_exhaustive(const QuboProblem& q, const ExhaustiveOptions& options = {});
SolverResult solve_sa(const QuboProblem& q, const AnnealSchedule& schedule);
SolverResult solve_tabu(const QuboProblem& q, const TabuParams& params);

/// Exactly re-optimizes the `subset_size` most strongly coupled variables
/// with the rest of `current` clamped. Never increases energy.
Bitstring sample_subproblem(const QuboProblem& q, const Bitstring& current, int subset_size,
                            std::uint64_t seed);

/// Per round, runs annealing, tabu search and sub-problem sampling
/// concurrently from the incumbent and keeps the lowest-energy result.
SolverResult solve_hybrid(const QuboProblem& q, const HybridConfig& config);

/// Single-flip tabu walk with aspiration, exposed for unit testing and used
/// by solve_tabu.
class TabuWalker {
 public:
  TabuWalker(const QuboProblem& q, int tenure);

  void reset(const Bitstring& start);
  void make_tabu(std::size_t variable, std::size_t for_iterations);
  bool is_tabu(std::size_t variable) const;

  /// Applies the best admissible flip; returns its index, or nothing when
  /// every move is tabu and none satisfies aspiration.
  std::optional<std::size_t> step();

  const Bitstring& state() const { return state_; }
  double energy() const { return energy_; }
  const Bitstring& best() const { return best_; }
  double best_energy() const { return best_energy_; }
  std::size_t iteration() const { return iteration_; }

 private:
  const QuboProblem& q_;
  Eigen::MatrixXd couplings_;
  std::size_t tenure_;
  Bitstring state_;
  Bitstring best_;
  Eigen::VectorXd delta_;  // energy change of flipping each variable
  std::vector<std::size_t> tabu_until_;
  double energy_ = 0.0;
  double best_energy_ = 0.0;
  std::size_t iteration_ = 0;

  void apply_flip(std::size_t i);
};

enum class Backend { exhaustive, sa, tabu, hybrid };

Backend parse_backend(const std::string& name);
std::string to_string(Backend backend);

struct SolverConfig {
  ExhaustiveOptions exhaustive{.weight_filter = true};
  AnnealSchedule sa;
  TabuParams tabu;
  HybridConfig hybrid;
  std::optional<double> penalty;
};

SolverResult solve(const QuboProblem& q, Backend backend, const SolverConfig& config);

struct Selection {
  std::vector<std::size_t> indices;
  double objective = 0.0;  // positive CMI objective of the selected set
  QuboProblem qubo;        // constrained problem that was solved
  SolverResult result;
};

/// Sum over i in F of MI(X_i;Y) + sum_{j in F, j != i} MI(X_j;Y|X_i).
double selection_objective(const CmiTensor& c, const std::vector<std::size_t>& indices);

/// Builds the MIQUBO, attaches the cardinality constraint, solves with the
/// chosen backend and keeps the best weight-k sample. Throws InfeasibleError
/// when no weight-k sample was produced.
Selection select_features(const CmiTensor& c, int k, Backend backend,
                          const SolverConfig& config = {});

}  // namespace miqubo
