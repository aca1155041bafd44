#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "miqubo/infotheory.hpp"
#include "miqubo/linalg.hpp"
#include "support.hpp"

using namespace miqubo;

namespace {

DiscretizedTable table_from(const std::vector<std::vector<int>>& feature_columns,
                            const std::vector<int>& target) {
  DiscretizedTable t;
  const auto n = static_cast<Eigen::Index>(target.size());
  t.codes.resize(n, static_cast<Eigen::Index>(feature_columns.size()));
  for (std::size_t j = 0; j < feature_columns.size(); ++j) {
    int max_code = 0;
    for (Eigen::Index r = 0; r < n; ++r) {
      t.codes(r, j) = feature_columns[j][r];
      max_code = std::max(max_code, feature_columns[j][r]);
    }
    t.bin_counts.push_back(max_code + 1);
  }
  t.target_codes = Eigen::Map<const Eigen::VectorXi>(target.data(), n);
  t.target_bin_count = t.target_codes.maxCoeff() + 1;
  return t;
}

}  // namespace

TEST_CASE("joint: counting examples") {
  const auto t = table_from({{0, 1, 1, 1}, {0, 1, 1, 1}}, {0, 0, 1, 1});
  const auto p = joint_distribution(t, {0}, false);
  REQUIRE(p.probabilities.size() == 2);
  CHECK(p.probabilities(0) == 0.25);
  CHECK(p.probabilities(1) == 0.75);

  const auto pair = joint_distribution(t, {0, 1}, false);
  CHECK(pair({0, 0}) == 0.25);
  CHECK(pair({1, 1}) == 0.75);
  CHECK(pair({0, 1}) == 0.0);
  CHECK(pair({1, 0}) == 0.0);
  CHECK(pair.support == 2);
}

TEST_CASE("joint: marginals of a 3-column table match direct counts") {
  Rng rng(5);
  const auto t = gen::random_table(rng, 3, 5, 40);
  const auto p = joint_distribution(t, {0, 1, 2}, true);
  CHECK(std::abs(p.probabilities.sum() - 1.0) <= 1e-12);
  CHECK((p.probabilities.array() >= 0.0).all());
  for (std::size_t axis = 0; axis < 4; ++axis) {
    const auto m = marginalize(p, {axis});
    const int card = axis == 0 ? t.target_bin_count : t.bin_counts[axis - 1];
    REQUIRE(m.probabilities.size() == card);
    for (int c = 0; c < card; ++c) {
      double count = 0.0;
      for (Eigen::Index r = 0; r < t.n_samples(); ++r)
        count += (axis == 0 ? t.target_codes(r) : t.codes(r, axis - 1)) == c;
      CHECK(std::abs(m.probabilities(c) - count / t.n_samples()) <= 1e-15);
    }
  }
}

TEST_CASE("joint: cell budget") {
  Rng rng(1);
  const auto t = gen::random_table(rng, 3, 6, 20);
  CHECK_THROWS_AS(joint_distribution(t, {0, 1, 2}, true, 4), std::length_error);
}

TEST_CASE("entropy: analytic values") {
  JointDistribution p;
  p.dims = {2};
  p.probabilities = Eigen::Vector2d(0.5, 0.5);
  CHECK(entropy(p) == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
  p.probabilities = Eigen::Vector2d(1.0, 0.0);
  CHECK(entropy(p) == 0.0);
  p.probabilities = Eigen::Vector2d(0.25, 0.75);
  const double expected = -0.25 * std::log(0.25) - 0.75 * std::log(0.75);
  CHECK(entropy(p) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(expected == doctest::Approx(0.5623351446).epsilon(1e-9));
}

TEST_CASE("mi: independence, identity and the one-flip table") {
  // Product joint: every (x, y) pair appears once.
  const auto indep = table_from({{0, 0, 1, 1}}, {0, 1, 0, 1});
  CHECK(std::abs(mutual_information(indep, 0)) <= 1e-12);

  const std::vector<int> y = {0, 1, 0, 1, 0, 1, 0, 1};
  const auto same = table_from({y}, y);
  CHECK(mutual_information(same, 0) == doctest::Approx(std::numbers::ln2).epsilon(1e-12));

  auto flipped = y;
  flipped[3] = 0;
  const auto t = table_from({flipped}, y);
  // Direct summation over the 2x2 joint: p(0,0)=4/8, p(0,1)=1/8, p(1,1)=3/8.
  const double px0 = 5.0 / 8, px1 = 3.0 / 8, py = 0.5;
  const double direct = 0.5 * std::log(0.5 / (px0 * py)) + 0.125 * std::log(0.125 / (px0 * py)) +
                        0.375 * std::log(0.375 / (px1 * py));
  CHECK(std::abs(mutual_information(t, 0) - direct) <= 1e-12);
}

TEST_CASE("cmi: constant conditioner, duplicate feature, chain rule") {
  Rng rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    auto t = gen::random_table(rng, 3, 2, 16);
    t.codes.col(2).setZero();
    t.bin_counts[2] = 1;
    CHECK(std::abs(conditional_mutual_information(t, 0, 2) - mutual_information(t, 0)) <= 1e-12);
    t.codes.col(1) = t.codes.col(0);
    t.bin_counts[1] = t.bin_counts[0];
    CHECK(std::abs(conditional_mutual_information(t, 1, 0)) <= 1e-12);
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto t = gen::random_table(rng, 3, 2, 16);
    for (Eigen::Index i = 0; i < 3; ++i)
      for (Eigen::Index j = 0; j < 3; ++j)
        if (i != j)
          CHECK(std::abs(conditional_mutual_information(t, j, i) - oracle::chain_rule_cmi(t, j, i)) <=
                1e-10);
  }
  const auto t = gen::random_table(rng, 2, 3, 10);
  CHECK_THROWS(conditional_mutual_information(t, 1, 1));
}

TEST_CASE("identities hold on random tables") {
  Rng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int nf = 1 + static_cast<int>(rng.below(4));
    const auto t = gen::random_table(rng, nf, 6, 4 + static_cast<int>(rng.below(61)));
    const double sy = entropy(joint_distribution(t, {}, true));
    for (Eigen::Index j = 0; j < nf; ++j) {
      const double mi = mutual_information(t, j);
      CHECK(mi >= 0.0);
      CHECK(std::abs(mi - (sy - conditional_target_entropy(t, j))) <= 1e-10);
      CHECK(std::abs(mi - oracle::feature_mi(t, j)) <= 1e-12);
      // Swapping roles: feature as "target" and target as feature.
      const double swapped = oracle::mutual_information(oracle::target(t), oracle::column(t, j));
      CHECK(std::abs(mi - swapped) <= 1e-12);
    }
  }
}

TEST_CASE("merging target bins never increases mi") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto t = gen::random_table(rng, 2, 6, 40);
    if (t.target_bin_count < 3) continue;
    const double before = mutual_information(t, 1);
    const int a = static_cast<int>(rng.below(t.target_bin_count));
    for (Eigen::Index r = 0; r < t.n_samples(); ++r)
      if (t.target_codes(r) == a) t.target_codes(r) = (a + 1) % t.target_bin_count;
    CHECK(mutual_information(t, 1) <= before + 1e-12);
  }
}

TEST_CASE("clamp: small negatives become zero, large ones throw") {
  CHECK(clamp_information(-5e-13) == 0.0);
  CHECK(clamp_information(0.3) == 0.3);
  CHECK_THROWS_AS(clamp_information(-1e-6), std::logic_error);
}

TEST_CASE("mi report: ranking, degenerate total and duplicates") {
  const auto t = table_from({{0, 1, 0, 1}, {0, 0, 1, 1}, {0, 0, 1, 1}}, {0, 0, 1, 1});
  const auto r = mi_report(t, {"noise", "dup_a", "dup_b"});
  CHECK(r.mi(0) == doctest::Approx(0.0));
  CHECK(r.mi(1) == r.mi(2));
  CHECK(r.ranking() == std::vector<std::size_t>{1, 2, 0});
  CHECK(r.concentration == doctest::Approx(1.0));

  const auto indep = table_from({{0, 0, 1, 1}, {0, 1, 0, 1}}, {0, 0, 0, 0});
  const auto z = mi_report(indep, {"a", "b"});
  CHECK(z.total_mi == 0.0);
  CHECK(z.concentration == 1.0);
}

TEST_CASE("cmi tensor: zeros, diagonal and element oracle") {
  const auto indep = table_from({{0, 0, 1, 1}, {0, 1, 0, 1}}, {0, 0, 0, 0});
  CHECK(cmi_tensor(indep).values.cwiseAbs().maxCoeff() <= 1e-12);

  Rng rng(31);
  const auto t = gen::random_table(rng, 4, 4, 32);
  const auto c = cmi_tensor(t);
  const auto r = mi_report(t, {"a", "b", "c", "d"});
  for (Eigen::Index i = 0; i < 4; ++i) {
    CHECK(c.values(i, i) == r.mi(i));
    for (Eigen::Index j = 0; j < 4; ++j) {
      if (i == j) continue;
      CHECK(c.values(i, j) >= 0.0);
      CHECK(std::abs(c.values(i, j) - std::max(0.0, oracle::chain_rule_cmi(t, j, i))) <= 1e-12);
    }
  }
}

TEST_CASE("evr: rank-one, isotropic and characteristic polynomial oracle") {
  EncodedDataset e;
  e.matrix.resize(5, 2);
  e.matrix.col(0) << -2, -1, 0, 1, 2;
  e.matrix.col(1) = e.matrix.col(0);
  auto evr = explained_variance_ratio(e);
  CHECK(std::abs(evr(0) - 1.0) <= 1e-10);
  CHECK(std::abs(evr(1)) <= 1e-10);

  e.matrix.resize(4, 3);
  e.matrix << 1, 1, 1, 1, -1, -1, -1, 1, -1, -1, -1, 1;  // columns orthogonal, equal norm
  evr = explained_variance_ratio(e);
  for (int i = 0; i < 3; ++i) CHECK(evr(i) == doctest::Approx(1.0 / 3).epsilon(1e-10));

  Rng rng(2024);
  e.matrix.resize(50, 5);
  for (Eigen::Index i = 0; i < e.matrix.size(); ++i) e.matrix(i) = rng.normal();
  e.target = e.matrix.col(0);
  evr = explained_variance_ratio(e);
  const Eigen::MatrixXd centered = e.matrix.rowwise() - e.matrix.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / 49.0;
  const auto roots = oracle::charpoly_eigenvalues(cov);
  REQUIRE(roots.size() == 5);
  double total = 0.0;
  for (double l : roots) total += l;
  for (int i = 0; i < 5; ++i) CHECK(std::abs(evr(i) - roots[i] / total) <= 1e-8);
  CHECK(evr.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // Row order does not matter.
  EncodedDataset shuffled = e;
  std::vector<std::size_t> order(50);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  shuffled = e.select_rows(order);
  CHECK((explained_variance_ratio(shuffled) - evr).cwiseAbs().maxCoeff() <= 1e-12);

  e.matrix.setConstant(4.0);
  CHECK_THROWS_AS(explained_variance_ratio(e), InputError);
}

TEST_CASE("jacobi: agrees with the oracle on random symmetric matrices") {
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd a(4, 4);
    for (Eigen::Index i = 0; i < 16; ++i) a(i) = rng.uniform(-1, 1);
    a = (a + a.transpose()).eval();
    const auto ev = jacobi_eigenvalues(a);
    const auto roots = oracle::charpoly_eigenvalues(a);
    REQUIRE(roots.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(ev(i) - roots[i]) <= 1e-8);
  }
}
