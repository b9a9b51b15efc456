#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "posewatch/error.hpp"
#include "posewatch/forest.hpp"
#include "posewatch/rng.hpp"

using namespace posewatch;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::kIo;
}

// Two features; the label is decided by x0 + x1 > 1.
Dataset separable(Rng& rng, std::size_t n) {
  Dataset d;
  d.feature_names = {"velocity_max", "distance_min"};
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform(0, 1), b = rng.uniform(0, 1);
    while (std::abs(a + b - 1.0) < 0.05) b = rng.uniform(0, 1);
    d.rows.push_back({a, b});
    d.labels.push_back(a + b > 1.0 ? 1 : 0);
    d.ids.push_back("s" + std::to_string(1000 + i));
  }
  return d;
}

Dataset random_small(Rng& rng, std::size_t n, std::size_t f, int levels) {
  Dataset d;
  for (std::size_t j = 0; j < f; ++j) d.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r;
    for (std::size_t j = 0; j < f; ++j) r.push_back(static_cast<double>(rng.uniform_index(static_cast<std::uint64_t>(levels))));
    d.rows.push_back(r);
    d.labels.push_back(i < 2 ? static_cast<int>(i) : static_cast<int>(rng.uniform_index(2)));
  }
  return d;
}

double accuracy(const ForestModel& m, const Dataset& d) {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < d.size(); ++i) ok += m.predict_row(d.rows[i]).label == d.labels[i];
  return static_cast<double>(ok) / static_cast<double>(d.size());
}

}  // namespace

TEST_CASE("balanced class weights") {
  std::vector<int> y(90, 0);
  std::fill(y.begin(), y.begin() + 29, 1);
  auto w = balanced_weights(y);
  CHECK(w[1] == doctest::Approx(1.5517).epsilon(1e-4));
  CHECK(w[0] == doctest::Approx(0.7377).epsilon(1e-4));

  std::vector<int> even(20, 0);
  std::fill(even.begin(), even.begin() + 10, 1);
  w = balanced_weights(even);
  CHECK(w[0] == 1.0);
  CHECK(w[1] == 1.0);

  std::vector<int> one(20, 1);
  CHECK(code_of([&] { balanced_weights(one); }) == ErrorCode::kMissingClass);
}

TEST_CASE("weighted gini") {
  std::vector<double> pure{4.0, 0.0}, half{2.5, 2.5}, skew{3.0, 1.0}, empty{0.0, 0.0};
  CHECK(weighted_gini(pure) == 0.0);
  CHECK(weighted_gini(half) == 0.5);
  CHECK(weighted_gini(skew) == doctest::Approx(0.375));
  CHECK(code_of([&] { weighted_gini(empty); }) == ErrorCode::kEmptyNode);
}

TEST_CASE("training on a separable set fits it and is deterministic") {
  Rng rng(7);
  auto d = separable(rng, 40);
  ForestConfig cfg;
  cfg.n_trees = 50;
  auto m = train(d, cfg);
  CHECK(accuracy(m, d) == 1.0);
  CHECK(serialize(train(d, cfg)) == serialize(m));

  CHECK(m.predict_row(std::vector<double>{0.95, 0.9}).label == 1);
  CHECK(m.predict_row(std::vector<double>{0.05, 0.1}).label == 0);
}

TEST_CASE("a feature carrying all the signal dominates importance") {
  Rng rng(8);
  Dataset d;
  d.feature_names = {"a", "b", "c", "d"};
  for (int i = 0; i < 200; ++i) {
    const int y = i % 2;
    d.rows.push_back({rng.uniform(0, 1), rng.uniform(0, 1), y + rng.uniform(-0.4, 0.4), rng.uniform(0, 1)});
    d.labels.push_back(y);
  }
  ForestConfig cfg;
  cfg.n_trees = 100;
  auto m = train(d, cfg);
  for (std::size_t f : {0u, 1u, 3u}) CHECK(m.importances[2] > m.importances[f]);
}

TEST_CASE("prediction rules") {
  ForestModel m;
  m.feature_names = {"x"};
  DecisionTree pos;
  pos.nodes.push_back({-1, 0.0, -1, -1, {0.0, 3.0}});
  DecisionTree neg;
  neg.nodes.push_back({-1, 0.0, -1, -1, {2.0, 0.0}});
  m.trees = {pos};
  auto p = m.predict_row(std::vector<double>{0.0});
  CHECK(p.label == 1);
  CHECK(p.probability == 1.0);
  m.trees = {pos, neg};
  p = m.predict_row(std::vector<double>{0.0});
  CHECK(p.probability == 0.5);
  CHECK(p.label == 1);

  auto schema = std::make_shared<const FeatureSchema>(std::vector<std::string>{"iouPeak"});
  FeatureVector fv(schema, {0.3});
  CHECK(code_of([&] { m.predict(fv); }) == ErrorCode::kSchemaMismatch);
}

TEST_CASE("serialization round trip and corrupt documents") {
  Rng rng(9);
  auto d = separable(rng, 60);
  ForestConfig cfg;
  cfg.n_trees = 20;
  auto m = train(d, cfg);
  const auto doc = serialize(m);
  auto back = deserialize(doc);
  CHECK(serialize(back) == doc);
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x{rng.uniform(-1, 2), rng.uniform(-1, 2)};
    CHECK(back.predict_row(x).probability == m.predict_row(x).probability);
  }

  CHECK(code_of([&] { deserialize(doc.substr(0, doc.size() / 2)); }) == ErrorCode::kCorruptModel);
  CHECK(code_of([&] { deserialize("[]"); }) == ErrorCode::kCorruptModel);
  auto future = doc;
  future.replace(future.find("\"version\":1"), 11, "\"version\":2");
  CHECK(code_of([&] { deserialize(future); }) == ErrorCode::kVersionMismatch);
}

TEST_CASE("training guards") {
  Dataset d;
  d.feature_names = {"x"};
  d.rows = {{1.0}, {2.0}};
  d.labels = {1, 1};
  CHECK(code_of([&] { train(d, {}); }) == ErrorCode::kMissingClass);
  d.labels = {0, 1};
  d.rows[1] = {std::nan("")};
  CHECK(code_of([&] { train(d, {}); }) == ErrorCode::kInvalidArgument);
  ForestConfig bad;
  bad.n_trees = 0;
  d.rows[1] = {2.0};
  CHECK(code_of([&] { train(d, bad); }) == ErrorCode::kInvalidConfig);
}

TEST_CASE("property: root split equals the exhaustive search") {
  Rng rng(10);
  int compared = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = 2 + rng.uniform_index(11);
    const auto f = 1 + rng.uniform_index(3);
    auto d = random_small(rng, n, f, 2 + static_cast<int>(rng.uniform_index(5)));
    const auto want = oracle::exhaustive_root_split(d);
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.features_per_split = static_cast<int>(f);
    const auto m = train(d, cfg);
    const auto& root = m.trees[0].nodes[0];
    if (!want) {
      CHECK(root.is_leaf());
      continue;
    }
    ++compared;
    CAPTURE(trial);
    REQUIRE_FALSE(root.is_leaf());
    CHECK(root.feature == want->feature);
    CHECK(root.threshold == want->threshold);
  }
  CHECK(compared > 1000);
}

TEST_CASE("property: importances are a distribution") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    auto d = random_small(rng, 30, 5, 6);
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = trial;
    auto m = train(d, cfg);
    const double sum = std::accumulate(m.importances.begin(), m.importances.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-9);
    for (double v : m.importances) CHECK(v >= 0.0);
  }
}

TEST_CASE("property: row order and thread count do not change the model") {
  Rng rng(12);
  auto d = separable(rng, 80);
  ForestConfig cfg;
  cfg.n_trees = 40;
  const auto ref = serialize(train(d, cfg));
  for (int threads : {2, 3, 8}) {
    cfg.threads = threads;
    CHECK(serialize(train(d, cfg)) == ref);
  }
  cfg.threads = 1;
  for (int trial = 0; trial < 5; ++trial) {
    Dataset shuffled = d;
    for (std::size_t i = d.size() - 1; i > 0; --i) {
      const auto j = rng.uniform_index(i + 1);
      std::swap(shuffled.rows[i], shuffled.rows[j]);
      std::swap(shuffled.labels[i], shuffled.labels[j]);
      std::swap(shuffled.ids[i], shuffled.ids[j]);
    }
    CHECK(serialize(train(shuffled, cfg)) == ref);
  }
}

TEST_CASE("property: one unrestricted tree fits distinct rows exactly") {
  Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    Dataset d;
    d.feature_names = {"a", "b", "c"};
    for (int i = 0; i < 50; ++i) {
      d.rows.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
      d.labels.push_back(i < 2 ? i : static_cast<int>(rng.uniform_index(2)));
    }
    ForestConfig cfg;
    cfg.n_trees = 1;
    cfg.bootstrap = false;
    cfg.seed = trial;
    CHECK(accuracy(train(d, cfg), d) == 1.0);
    for (const auto& tree : train(d, cfg).trees) {
      for (const auto& node : tree.nodes) {
        if (node.is_leaf()) CHECK((node.counts[0] == 0.0 || node.counts[1] == 0.0));
      }
    }
  }
}

TEST_CASE("select_columns keeps the requested order") {
  Rng rng(14);
  auto d = separable(rng, 5);
  std::vector<std::string> names{"distance_min", "velocity_max"};
  auto s = d.select_columns(names);
  CHECK(s.rows[0][0] == d.rows[0][1]);
  std::vector<std::string> bad{"nope"};
  CHECK(code_of([&] { d.select_columns(bad); }) == ErrorCode::kUnknownFeature);
}
