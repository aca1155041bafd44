#include "miqubo/qubo.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "miqubo/error.hpp"

namespace miqubo {

Bitstring Bitstring::from_string(const std::string& s) {
  Bitstring b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw InputError("bitstring: invalid character in '" + s + "'");
    b.bits[i] = s[i] == '1' ? 1 : 0;
  }
  return b;
}

std::size_t Bitstring::weight() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<std::size_t> Bitstring::ones() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out.push_back(i);
  return out;
}

std::string Bitstring::to_string() const {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) s[i] = '1';
  return s;
}

void QuboProblem::set_coupling(Eigen::Index i, Eigen::Index j, double value) {
  if (i == j) throw std::invalid_argument("QuboProblem: self-coupling is a linear term");
  if (i > j) std::swap(i, j);
  quadratic(i, j) = value;
}

Eigen::MatrixXd QuboProblem::symmetric_couplings() const {
  Eigen::MatrixXd j = quadratic.triangularView<Eigen::StrictlyUpper>();
  return j + j.transpose();
}

double QuboProblem::max_abs_coefficient() const {
  double m = linear.size() ? linear.cwiseAbs().maxCoeff() : 0.0;
  if (quadratic.size()) m = std::max(m, quadratic.cwiseAbs().maxCoeff());
  return m;
}

void QuboProblem::validate() const {
  const Eigen::Index n = size();
  if (quadratic.rows() != n || quadratic.cols() != n)
    throw InputError("qubo: quadratic matrix shape does not match n");
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j)
      if (quadratic(i, j) != 0.0) throw InputError("qubo: quadratic terms must satisfy i < j");
  if (!linear.allFinite() || !quadratic.allFinite()) throw InputError("qubo: non-finite coefficient");
  if (!labels.empty() && labels.size() != static_cast<std::size_t>(n))
    throw InputError("qubo: label count does not match n");
  if (k) {
    if (*k < 1 || *k > n) throw InputError("qubo: cardinality k out of range");
    if (!(penalty_strength > 0.0)) throw InputError("qubo: cardinality set without a positive penalty");
  }
}

QuboProblem build_miqubo(const CmiTensor& c) {
  const Eigen::Index n = c.size();
  if (c.values.cols() != n) throw InputError("build_miqubo: CMI tensor is not square");
  if (!c.values.allFinite()) throw InputError("build_miqubo: non-finite CMI tensor entry");
  QuboProblem q(n);
  q.labels = c.feature_names;
  q.linear = -c.values.diagonal();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) q.quadratic(i, j) = -(c.values(i, j) + c.values(j, i));
  return q;
}

double default_penalty_strength(const QuboProblem& q) {
  // Any flip changes the unpenalized energy by at most |q_i| + sum_j |q_ij|;
  // a penalty above that makes every off-cardinality string improvable.
  const Eigen::MatrixXd j = q.symmetric_couplings();
  double max_flip = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i)
    max_flip = std::max(max_flip, std::abs(q.linear(i)) + j.row(i).cwiseAbs().sum());
  return std::max(2.0 * q.max_abs_coefficient(), max_flip) + 1e-9;
}

QuboProblem with_cardinality(const QuboProblem& q, int k, std::optional<double> penalty) {
  const Eigen::Index n = q.size();
  if (k < 1 || k > n)
    throw InputError("with_cardinality: k = " + std::to_string(k) + " outside [1, " +
                     std::to_string(n) + "]");
  if (q.k) throw InputError("with_cardinality: problem already carries a cardinality constraint");
  const double p = penalty.value_or(default_penalty_strength(q));
  if (!(p > 0.0)) throw InputError("with_cardinality: penalty must be positive");

  QuboProblem out = q;
  out.k = k;
  out.penalty_strength = p;
  // P (sum x - k)^2 = P (1 - 2k) sum x_i + 2P sum_{i<j} x_i x_j + P k^2
  out.linear.array() += p * (1.0 - 2.0 * k);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) out.quadratic(i, j) += 2.0 * p;
  out.offset += p * static_cast<double>(k) * k;
  return out;
}

double energy(const QuboProblem& q, const Bitstring& x) {
  if (x.size() != static_cast<std::size_t>(q.size()))
    throw std::invalid_argument("energy: bitstring length " + std::to_string(x.size()) +
                                " does not match n = " + std::to_string(q.size()));
  double e = 0.0;
  const Eigen::Index n = q.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!x[static_cast<std::size_t>(i)]) continue;
    e += q.linear(i);
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (x[static_cast<std::size_t>(j)]) e += q.quadratic(i, j);
  }
  return e;
}

double penalty_contribution(const QuboProblem& q, const Bitstring& x) {
  if (!q.k) return 0.0;
  const double w = static_cast<double>(x.weight());
  const double k = *q.k;
  return q.penalty_strength * ((w - k) * (w - k) - k * k);
}

double unpenalized_energy(const QuboProblem& q, const Bitstring& x) {
  return energy(q, x) - penalty_contribution(q, x);
}

SparsityReport sparsity_report(const QuboProblem& q, double threshold) {
  if (threshold < 0.0) throw std::invalid_argument("sparsity_report: negative threshold");
  SparsityReport r;
  const Eigen::Index n = q.size();
  r.pattern.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (std::abs(q.quadratic(i, j)) > threshold) {
        r.pattern[static_cast<std::size_t>(i)].push_back(static_cast<std::size_t>(j));
        ++r.nnz;
      }
  const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  r.density = pairs > 0.0 ? static_cast<double>(r.nnz) / pairs : 0.0;
  return r;
}

void write_coo(std::ostream& out, const QuboProblem& q) {
  out.precision(17);
  const Eigen::Index n = q.size();
  out << "# n " << n << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    if (q.linear(i) != 0.0) out << i << ' ' << i << ' ' << q.linear(i) << '\n';
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (q.quadratic(i, j) != 0.0) out << i << ' ' << j << ' ' << q.quadratic(i, j) << '\n';
}

QuboProblem read_coo(std::istream& in) {
  struct Entry {
    long i, j;
    double v;
  };
  std::vector<Entry> entries;
  long n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string key;
      long value;
      if (hs >> key >> value && key == "n") n = std::max(n, value);
      continue;
    }
    std::istringstream ls(line);
    Entry e{};
    if (!(ls >> e.i >> e.j >> e.v) || e.i < 0 || e.j < 0)
      throw InputError("coo: malformed line " + std::to_string(line_no));
    n = std::max({n, e.i + 1, e.j + 1});
    entries.push_back(e);
  }
  QuboProblem q(n);
  for (const auto& e : entries) {
    if (e.i == e.j)
      q.linear(e.i) += e.v;
    else
      q.quadratic(std::min(e.i, e.j), std::max(e.i, e.j)) += e.v;
  }
  return q;
}

}  // namespace miqubo
