#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "miqubo/infotheory.hpp"

namespace miqubo {

/// Binary assignment x_0 .. x_{n-1}. Ordering is lexicographic with x_0 as
/// the most significant position; it is the tie-break used by every solver.
struct Bitstring {
  std::vector<std::uint8_t> bits;

  Bitstring() = default;
  explicit Bitstring(std::size_t n) : bits(n, 0) {}
  explicit Bitstring(std::vector<std::uint8_t> b) : bits(std::move(b)) {}
  static Bitstring from_string(const std::string& s);

  std::size_t size() const { return bits.size(); }
  std::uint8_t operator[](std::size_t i) const { return bits[i]; }
  std::uint8_t& operator[](std::size_t i) { return bits[i]; }
  void flip(std::size_t i) { bits[i] ^= 1U; }
  std::size_t weight() const;
  std::vector<std::size_t> ones() const;
  std::string to_string() const;

  auto operator<=>(const Bitstring&) const = default;
};

/// min sum_i q_i x_i + sum_{i<j} q_ij x_i x_j, plus an optional cardinality
/// penalty P (sum x - k)^2 already folded into the coefficients. The
/// constant P k^2 is carried in `offset` and excluded from energy().
struct QuboProblem {
  Eigen::VectorXd linear;
  Eigen::MatrixXd quadratic;  // strictly upper triangular, n x n
  double penalty_strength = 0.0;
  std::optional<int> k;
  double offset = 0.0;
  std::vector<std::string> labels;

  QuboProblem() = default;
  explicit QuboProblem(Eigen::Index n)
      : linear(Eigen::VectorXd::Zero(n)), quadratic(Eigen::MatrixXd::Zero(n, n)) {}

  Eigen::Index size() const { return linear.size(); }

  /// Symmetric accessor for the i<j coupler.
  double coupling(Eigen::Index i, Eigen::Index j) const {
    return i < j ? quadratic(i, j) : quadratic(j, i);
  }
  void set_coupling(Eigen::Index i, Eigen::Index j, double value);

  /// Symmetric coupling matrix J with J(i,j) = J(j,i) = q_ij and zero diagonal.
  Eigen::MatrixXd symmetric_couplings() const;

  /// Largest absolute linear or quadratic coefficient.
  double max_abs_coefficient() const;

  /// Throws InputError on shape or invariant violations.
  void validate() const;
};

/// Q_ii = -MI(X_i;Y); q_ij = -(CMI(X_j;Y|X_i) + CMI(X_i;Y|X_j)) for i<j.
QuboProblem build_miqubo(const CmiTensor& c);

/// Smallest penalty guaranteeing that every ground state has weight k:
/// larger than any single-flip change in the unpenalized energy.
double default_penalty_strength(const QuboProblem& q);

QuboProblem with_cardinality(const QuboProblem& q, int k,
                             std::optional<double> penalty = std::nullopt);

double energy(const QuboProblem& q, const Bitstring& x);

/// Energy contributed by the folded cardinality penalty, net of offset:
/// P ((w - k)^2 - k^2). Zero when no k is attached.
double penalty_contribution(const QuboProblem& q, const Bitstring& x);

/// Energy with the cardinality penalty removed.
double unpenalized_energy(const QuboProblem& q, const Bitstring& x);

struct SparsityReport {
  std::size_t nnz = 0;
  double density = 0.0;
  std::vector<std::vector<std::size_t>> pattern;  // per row i, columns j>i above threshold
};

SparsityReport sparsity_report(const QuboProblem& q, double threshold);

/// Plain-text COO form: one `i j value` line per nonzero, diagonal entries
/// are linear terms. Reading yields an unconstrained problem.
void write_coo(std::ostream& out, const QuboProblem& q);
QuboProblem read_coo(std::istream& in);

}  // namespace miqubo
