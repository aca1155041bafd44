// Independent reference implementations and random instance generators
// shared by the unit and acceptance tests. Nothing here calls into the
// library's estimators or solvers.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "miqubo/data.hpp"
#include "miqubo/infotheory.hpp"
#include "miqubo/qubo.hpp"
#include "miqubo/random.hpp"

namespace oracle {

using Symbol = std::vector<int>;

inline double entropy_of(const std::vector<Symbol>& xs) {
  std::map<Symbol, double> counts;
  for (const auto& x : xs) counts[x] += 1.0;
  const double n = static_cast<double>(xs.size());
  double s = 0.0;
  for (const auto& [key, c] : counts) s -= (c / n) * std::log(c / n);
  return s;
}

/// Plug-in MI by summing p(a,b) log(p(a,b) / (p(a) p(b))) over observed pairs.
inline double mutual_information(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::map<Symbol, double> pa, pb;
  std::map<std::pair<Symbol, Symbol>, double> pab;
  const double n = static_cast<double>(a.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    pa[a[r]] += 1.0 / n;
    pb[b[r]] += 1.0 / n;
    pab[{a[r], b[r]}] += 1.0 / n;
  }
  double mi = 0.0;
  for (const auto& [key, p] : pab) mi += p * std::log(p / (pa[key.first] * pb[key.second]));
  return mi;
}

inline std::vector<Symbol> column(const miqubo::DiscretizedTable& t, Eigen::Index j) {
  std::vector<Symbol> out;
  for (Eigen::Index r = 0; r < t.n_samples(); ++r) out.push_back({t.codes(r, j)});
  return out;
}

inline std::vector<Symbol> target(const miqubo::DiscretizedTable& t) {
  std::vector<Symbol> out;
  for (Eigen::Index r = 0; r < t.n_samples(); ++r) out.push_back({t.target_codes(r)});
  return out;
}

inline std::vector<Symbol> zip(const std::vector<Symbol>& a, const std::vector<Symbol>& b) {
  std::vector<Symbol> out;
  for (std::size_t r = 0; r < a.size(); ++r) {
    Symbol s = a[r];
    s.insert(s.end(), b[r].begin(), b[r].end());
    out.push_back(s);
  }
  return out;
}

inline double feature_mi(const miqubo::DiscretizedTable& t, Eigen::Index j) {
  return mutual_information(column(t, j), target(t));
}

/// MI(X_j; Y | X_i) via the chain rule MI(X_j; (Y, X_i)) - MI(X_j; X_i).
inline double chain_rule_cmi(const miqubo::DiscretizedTable& t, Eigen::Index j, Eigen::Index i) {
  const auto xj = column(t, j);
  const auto xi = column(t, i);
  return mutual_information(xj, zip(target(t), xi)) - mutual_information(xj, xi);
}

/// Sum over i in F of MI_i plus the sum over ordered pairs i != j in F of
/// CMI(j | i), read straight from the tensor.
inline double selection_objective(const Eigen::MatrixXd& cmi, const std::vector<std::size_t>& f) {
  double total = 0.0;
  for (auto i : f) {
    total += cmi(i, i);
    for (auto j : f)
      if (j != i) total += cmi(i, j);
  }
  return total;
}

inline double qubo_energy(const miqubo::QuboProblem& q, const std::vector<int>& x) {
  double e = 0.0;
  const auto n = q.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!x[i]) continue;
    e += q.linear(i);
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (x[j]) e += q.quadratic(i, j);
  }
  return e;
}

inline std::vector<int> bits_of(std::uint64_t mask, int n) {
  // x_0 is the most significant position so that counting up is lexicographic.
  std::vector<int> x(n);
  for (int i = 0; i < n; ++i) x[i] = (mask >> (n - 1 - i)) & 1U;
  return x;
}

struct GroundStates {
  double energy = std::numeric_limits<double>::infinity();
  std::vector<std::vector<int>> states;  // lexicographic order
};

/// Enumerates all 2^n strings (optionally only weight w) and returns every
/// state within `tol` of the minimum.
inline GroundStates brute_force(const miqubo::QuboProblem& q, int weight = -1,
                                double tol = 1e-12) {
  const int n = static_cast<int>(q.size());
  std::vector<std::pair<double, std::vector<int>>> all;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    auto x = bits_of(m, n);
    if (weight >= 0) {
      int w = 0;
      for (int b : x) w += b;
      if (w != weight) continue;
    }
    all.emplace_back(qubo_energy(q, x), std::move(x));
  }
  GroundStates g;
  for (const auto& [e, x] : all) g.energy = std::min(g.energy, e);
  for (const auto& [e, x] : all)
    if (e <= g.energy + tol) g.states.push_back(x);
  return g;
}

inline std::vector<int> to_vector(const miqubo::Bitstring& b) {
  return std::vector<int>(b.bits.begin(), b.bits.end());
}

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(Eigen::MatrixXd a) {
  const auto n = a.rows();
  double det = 1.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    Eigen::Index p = c;
    for (Eigen::Index r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) {
      a.row(p).swap(a.row(c));
      det = -det;
    }
    det *= a(c, c);
    for (Eigen::Index r = c + 1; r < n; ++r) a.row(r) -= a(r, c) / a(c, c) * a.row(c);
  }
  return det;
}

/// Eigenvalues of a small symmetric matrix with distinct eigenvalues from
/// sign changes of det(A - lambda I) on a fine grid, refined by bisection.
/// Returned descending.
inline std::vector<double> charpoly_eigenvalues(const Eigen::MatrixXd& a, int grid = 200000) {
  const auto n = a.rows();
  double bound = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) bound = std::max(bound, a.row(i).cwiseAbs().sum());
  bound += 1e-6;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  auto f = [&](double l) { return determinant(a - l * id); };
  std::vector<double> roots;
  double prev_x = -bound;
  double prev_f = f(prev_x);
  for (int g = 1; g <= grid; ++g) {
    const double x = -bound + 2.0 * bound * g / grid;
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if ((fx > 0) != (prev_f > 0) && prev_f != 0.0) {
      double lo = prev_x, hi = x, flo = prev_f;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = fx;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

}  // namespace oracle

namespace gen {

/// Random discretized table: each feature and the target get a cardinality
/// in [2, max_bins] and codes drawn uniformly, with the target loosely tied
/// to the first feature so that MI values are not all near zero.
inline miqubo::DiscretizedTable random_table(miqubo::Rng& rng, int n_features, int max_bins,
                                             int n_samples) {
  miqubo::DiscretizedTable t;
  t.codes.resize(n_samples, n_features);
  for (int j = 0; j < n_features; ++j) {
    const int b = 2 + static_cast<int>(rng.below(max_bins - 1));
    t.bin_counts.push_back(b);
    for (int r = 0; r < n_samples; ++r) t.codes(r, j) = static_cast<int>(rng.below(b));
  }
  t.target_bin_count = 2 + static_cast<int>(rng.below(max_bins - 1));
  t.target_codes.resize(n_samples);
  for (int r = 0; r < n_samples; ++r) {
    if (n_features > 0 && rng.uniform() < 0.5)
      t.target_codes(r) = t.codes(r, 0) % t.target_bin_count;
    else
      t.target_codes(r) = static_cast<int>(rng.below(t.target_bin_count));
  }
  return t;
}

inline miqubo::QuboProblem random_qubo(miqubo::Rng& rng, int n) {
  miqubo::QuboProblem q(n);
  for (int i = 0; i < n; ++i) q.linear(i) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) q.quadratic(i, j) = rng.uniform(-1.0, 1.0);
  return q;
}

/// Random nonnegative CMI tensor with a positive diagonal.
inline miqubo::CmiTensor random_tensor(miqubo::Rng& rng, int n) {
  miqubo::CmiTensor c;
  c.values.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) c.values(i, j) = rng.uniform(0.0, i == j ? 1.0 : 0.3);
  for (int i = 0; i < n; ++i) c.feature_names.push_back("f" + std::to_string(i));
  return c;
}

/// Dataset with features a, a_copy (exact duplicate), b, and three noise
/// columns; the target depends on a and b.
inline miqubo::EncodedDataset duplicated_features(std::uint64_t seed, int n_samples = 400) {
  miqubo::Rng rng(seed);
  miqubo::EncodedDataset e;
  e.feature_names = {"a", "a_copy", "b", "noise_0", "noise_1", "noise_2"};
  e.matrix.resize(n_samples, 6);
  e.target.resize(n_samples);
  for (int r = 0; r < n_samples; ++r) {
    const double a = rng.normal();
    const double b = rng.normal();
    e.matrix(r, 0) = a;
    e.matrix(r, 1) = a;
    e.matrix(r, 2) = b;
    for (int j = 3; j < 6; ++j) e.matrix(r, j) = rng.normal();
    e.target(r) = 1.2 * a + 0.9 * b + 0.1 * rng.normal();
  }
  e.target_name = "target";
  e.raw_names = e.feature_names;
  for (std::size_t j = 0; j < 6; ++j) e.origin.push_back(j);
  return e;
}

}  // namespace gen
