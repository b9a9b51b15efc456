#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "posewatch/error.hpp"
#include "posewatch/rng.hpp"
#include "posewatch/schema.hpp"
#include "posewatch/selection.hpp"

using namespace posewatch;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, std::vector<double>(d));
  for (auto& row : m) {
    for (double& x : row) x = rng.normal(0.0, 1.0);
  }
  // Correlate the columns a little so the spectrum is not flat.
  for (auto& row : m) {
    for (std::size_t j = 1; j < d; ++j) row[j] += 0.5 * row[j - 1] * static_cast<double>(j);
  }
  return m;
}

double column_variance(const Matrix& m, std::size_t c) {
  double mean = 0.0;
  for (const auto& r : m) mean += r[c];
  mean /= static_cast<double>(m.size());
  double ss = 0.0;
  for (const auto& r : m) ss += (r[c] - mean) * (r[c] - mean);
  return ss / static_cast<double>(m.size() - 1);
}

}  // namespace

TEST_CASE("published top-10 importances rank in order") {
  // Published ranking; importances are in units of 1e-2.
  const std::vector<std::pair<std::string, double>> table = {
      {"dist_p95", 5.236},         {"handToHip_max", 4.802}, {"handToTorso_mean", 4.781},
      {"handToTorso_p95", 4.297},  {"handToTorso_max", 4.239}, {"distancet_max", 4.188},
      {"handToTorso_median", 3.340}, {"handToHip_p95", 2.763}, {"distance_mean", 2.459},
      {"closeHandPct", 2.352}};
  // Present them in catalog order with the rest of the catalog at lower values.
  const auto& names = FeatureSchema::full().names();
  std::vector<double> imp(names.size(), 0.001);
  for (const auto& [alias, v] : table) imp[*FeatureSchema::full().index_of(canonical_feature_name(alias))] = v;

  auto r = select_top_k(names, imp, 10);
  REQUIRE(r.ranked.size() == 10);
  for (std::size_t i = 0; i < 10; ++i) {
    CAPTURE(i);
    CHECK(r.ranked[i].first == canonical_feature_name(table[i].first));
    CHECK(r.ranked[i].second == table[i].second);
  }
  CHECK(r.reduced_schema.size() == 10);
  // Reduced schema keeps catalog order.
  FeatureSchema reduced(r.reduced_schema);
  for (std::size_t i = 1; i < 10; ++i) CHECK(reduced.catalog_indices()[i - 1] < reduced.catalog_indices()[i]);
}

TEST_CASE("selection tie-break, identity and guards") {
  std::vector<std::string> names{"a", "b", "c", "d", "e"};
  std::vector<double> flat(5, 0.2);
  auto r = select_top_k(names, flat, 3);
  CHECK(r.reduced_schema == std::vector<std::string>{"a", "b", "c"});

  std::vector<double> imp{0.1, 0.4, 0.2, 0.2, 0.1};
  r = select_top_k(names, imp, 5);
  CHECK(r.reduced_schema == names);
  CHECK(r.ranked[0].first == "b");
  CHECK(r.ranked[1].first == "c");
  CHECK(r.ranked[2].first == "d");

  CHECK_THROWS_AS(select_top_k(names, imp, 6), Error);
  std::vector<double> short_imp{0.5};
  CHECK_THROWS_AS(select_top_k(names, short_imp, 1), Error);
}

TEST_CASE("property: selection is idempotent") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto d = 1 + rng.uniform_index(30);
    std::vector<std::string> names;
    std::vector<double> imp;
    for (std::size_t i = 0; i < d; ++i) {
      names.push_back("f" + std::to_string(i));
      imp.push_back(static_cast<double>(rng.uniform_index(5)));
    }
    const auto k = 1 + rng.uniform_index(d);
    auto first = select_top_k(names, imp, k);
    std::vector<double> sub;
    for (const auto& n : first.reduced_schema) {
      sub.push_back(imp[static_cast<std::size_t>(std::find(names.begin(), names.end(), n) - names.begin())]);
    }
    auto second = select_top_k(first.reduced_schema, sub, k);
    CHECK(second.reduced_schema == first.reduced_schema);
  }
}

TEST_CASE("PCA on the line y = 2x") {
  Matrix m;
  for (int i = -3; i <= 3; ++i) m.push_back({1.0 * i, 2.0 * i});
  auto p = pca_project(m, 1, false);
  CHECK(p.components[0][0] == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(p.components[0][1] == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK(p.explained_variance_ratio[0] == doctest::Approx(1.0));
}

TEST_CASE("PCA on an isotropic cross") {
  Matrix m{{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  auto p = pca_project(m, 2, false);
  CHECK(p.explained_variance[0] == doctest::Approx(p.explained_variance[1]));
  CHECK(p.explained_variance_ratio[0] == doctest::Approx(0.5));
  CHECK(p.explained_variance_ratio[1] == doctest::Approx(0.5));
  const auto& c = p.components;
  CHECK(c[0][0] * c[1][0] + c[0][1] * c[1][1] == doctest::Approx(0.0));
  CHECK(c[0][0] * c[0][0] + c[0][1] * c[0][1] == doctest::Approx(1.0));
}

TEST_CASE("property: projected variances equal eigenvalues and match Eigen") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_matrix(rng, 20, 5);
    const bool standardize = trial % 2 == 0;
    auto p = pca_project(m, 5, standardize);
    for (std::size_t c = 0; c < 5; ++c) CHECK(std::abs(column_variance(p.projected, c) - p.explained_variance[c]) < 1e-6);

    // Independent eigensolver on the same covariance.
    Eigen::MatrixXd x(20, 5);
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 5; ++j) x(i, j) = m[i][j];
    }
    Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
    if (standardize) {
      for (int j = 0; j < 5; ++j) centered.col(j) /= std::sqrt(centered.col(j).squaredNorm() / 19.0);
    }
    Eigen::MatrixXd cov = centered.transpose() * centered / 19.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    for (int c = 0; c < 5; ++c) {
      CHECK(std::abs(es.eigenvalues()(4 - c) - p.explained_variance[static_cast<std::size_t>(c)]) < 1e-9);
      // Same direction up to sign.
      double dot = 0.0;
      for (int j = 0; j < 5; ++j) dot += es.eigenvectors()(j, 4 - c) * p.components[static_cast<std::size_t>(c)][static_cast<std::size_t>(j)];
      CHECK(std::abs(std::abs(dot) - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("property: full reconstruction returns the centered data") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto m = random_matrix(rng, 30, 6);
    auto p = pca_project(m, 6, false);
    for (std::size_t i = 0; i < m.size(); ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        double r = 0.0;
        for (std::size_t c = 0; c < 6; ++c) r += p.projected[i][c] * p.components[c][j];
        CHECK(std::abs(r - (m[i][j] - p.mean[j])) < 1e-6);
      }
    }
  }
}

TEST_CASE("symmetric eigen residuals and PCA guards") {
  Rng rng(6);
  Matrix a(6, std::vector<double>(6));
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = i; j < 6; ++j) a[i][j] = a[j][i] = rng.uniform(-2, 2);
  }
  auto e = symmetric_eigen(a);
  for (std::size_t k = 0; k < 6; ++k) {
    if (k > 0) CHECK(e.values[k - 1] >= e.values[k]);
    for (std::size_t i = 0; i < 6; ++i) {
      double av = 0.0;
      for (std::size_t j = 0; j < 6; ++j) av += a[i][j] * e.vectors[k][j];
      CHECK(std::abs(av - e.values[k] * e.vectors[k][i]) < 1e-9);
    }
  }

  Matrix one{{1, 2}};
  CHECK_THROWS_AS(pca_project(one, 1), Error);
  Matrix small{{1, 2}, {3, 4}, {5, 7}};
  CHECK_THROWS_AS(pca_project(small, 3), Error);
  Matrix constant_col{{1, 5}, {2, 5}, {3, 5}};
  auto p = pca_project(constant_col, 1, true);
  CHECK(p.explained_variance[0] == doctest::Approx(1.0));
}
