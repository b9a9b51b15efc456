#include "posewatch/forest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <thread>

#include <json.hpp>

#include "posewatch/error.hpp"
#include "posewatch/rng.hpp"

namespace posewatch {

namespace {

constexpr double kRelativeTieTolerance = 1e-12;
constexpr const char* kFormatName = "posewatch-forest";

bool gains_tie(double a, double b) {
  return std::abs(a - b) <= kRelativeTieTolerance * std::max({1.0, std::abs(a), std::abs(b)});
}

// True when candidate (gain, feature, threshold) beats the incumbent.
bool better_split(const SplitChoice& cand, const SplitChoice& best) {
  if (gains_tie(cand.gain, best.gain)) {
    if (cand.feature != best.feature) return cand.feature < best.feature;
    return cand.threshold < best.threshold;
  }
  return cand.gain > best.gain;
}

double gini2(double c0, double c1) {
  const double total = c0 + c1;
  const double p0 = c0 / total;
  const double p1 = c1 / total;
  return 1.0 - (p0 * p0 + p1 * p1);
}

struct TreeBuilder {
  const Dataset& data;
  const ForestConfig& cfg;
  const ClassWeights& weights;
  int features_per_split;
  Rng rng;
  DecisionTree tree;
  std::vector<double> importance;
  std::vector<int> feature_order;

  TreeBuilder(const Dataset& d, const ForestConfig& c, const ClassWeights& w, int mtry,
              std::uint64_t tree_index)
      : data(d),
        cfg(c),
        weights(w),
        features_per_split(mtry),
        rng(c.seed, tree_index),
        importance(d.num_features(), 0.0),
        feature_order(d.num_features()) {}

  std::array<double, kNumClasses> node_counts(std::span<const std::size_t> samples) const {
    std::array<std::size_t, kNumClasses> n{};
    for (std::size_t s : samples) ++n[static_cast<std::size_t>(data.labels[s])];
    return {static_cast<double>(n[0]) * weights[0], static_cast<double>(n[1]) * weights[1]};
  }

  bool is_constant(std::span<const std::size_t> samples, int f) const {
    const double first = data.rows[samples[0]][static_cast<std::size_t>(f)];
    return std::all_of(samples.begin(), samples.end(), [&](std::size_t s) {
      return data.rows[s][static_cast<std::size_t>(f)] == first;
    });
  }

  int build(std::vector<std::size_t> samples, int depth) {
    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    const auto counts = node_counts(samples);
    tree.nodes[static_cast<std::size_t>(index)].counts = counts;

    const double impurity = gini2(counts[0], counts[1]);
    const bool depth_reached = cfg.max_depth && depth >= *cfg.max_depth;
    if (impurity == 0.0 || depth_reached ||
        samples.size() < 2 * static_cast<std::size_t>(cfg.min_samples_leaf)) {
      return index;
    }

    // Partial Fisher-Yates: keep drawing until `features_per_split`
    // non-constant features were seen or none remain.
    std::iota(feature_order.begin(), feature_order.end(), 0);
    std::vector<int> candidates;
    const std::size_t d = feature_order.size();
    for (std::size_t k = 0; k < d && static_cast<int>(candidates.size()) < features_per_split; ++k) {
      const std::size_t j = k + rng.uniform_index(d - k);
      std::swap(feature_order[k], feature_order[j]);
      if (!is_constant(samples, feature_order[k])) candidates.push_back(feature_order[k]);
    }
    if (candidates.empty()) return index;

    const auto split = best_split(data, samples, candidates, weights, cfg.min_samples_leaf);
    if (!split) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    for (std::size_t s : samples) {
      (data.rows[s][static_cast<std::size_t>(split->feature)] <= split->threshold ? left : right)
          .push_back(s);
    }
    const auto lc = node_counts(left);
    const auto rc = node_counts(right);
    const double w = counts[0] + counts[1];
    const double wl = lc[0] + lc[1];
    const double wr = rc[0] + rc[1];
    importance[static_cast<std::size_t>(split->feature)] +=
        w * impurity - wl * gini2(lc[0], lc[1]) - wr * gini2(rc[0], rc[1]);

    samples.clear();
    samples.shrink_to_fit();
    const int l = build(std::move(left), depth + 1);
    const int r = build(std::move(right), depth + 1);
    auto& node = tree.nodes[static_cast<std::size_t>(index)];
    node.feature = split->feature;
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return index;
  }
};

// Row permutation that sorts by id when ids are present and unique.
std::vector<std::size_t> canonical_order(const Dataset& data) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  if (data.ids.size() != data.size()) return order;
  std::set<std::string> unique(data.ids.begin(), data.ids.end());
  if (unique.size() != data.ids.size()) return order;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.ids[a] < data.ids[b]; });
  return order;
}

nlohmann::json config_to_json(const ForestConfig& cfg) {
  nlohmann::json j;
  j["n_trees"] = cfg.n_trees;
  j["seed"] = cfg.seed;
  j["class_weight"] = cfg.class_weight == ClassWeightMode::kBalanced ? "balanced" : "uniform";
  j["max_depth"] = cfg.max_depth ? nlohmann::json(*cfg.max_depth) : nlohmann::json(nullptr);
  j["min_samples_leaf"] = cfg.min_samples_leaf;
  j["features_per_split"] =
      cfg.features_per_split ? nlohmann::json(*cfg.features_per_split) : nlohmann::json(nullptr);
  j["bootstrap"] = cfg.bootstrap;
  return j;
}

ForestConfig config_from_json(const nlohmann::json& j) {
  ForestConfig cfg;
  cfg.n_trees = j.at("n_trees").get<int>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  const auto mode = j.at("class_weight").get<std::string>();
  if (mode == "balanced") {
    cfg.class_weight = ClassWeightMode::kBalanced;
  } else if (mode == "uniform") {
    cfg.class_weight = ClassWeightMode::kUniform;
  } else {
    throw Error(ErrorCode::kCorruptModel, "unknown class_weight '" + mode + "'");
  }
  if (!j.at("max_depth").is_null()) cfg.max_depth = j.at("max_depth").get<int>();
  cfg.min_samples_leaf = j.at("min_samples_leaf").get<int>();
  if (!j.at("features_per_split").is_null()) {
    cfg.features_per_split = j.at("features_per_split").get<int>();
  }
  cfg.bootstrap = j.at("bootstrap").get<bool>();
  return cfg;
}

}  // namespace

void Dataset::validate() const {
  if (rows.size() != labels.size()) {
    throw Error(ErrorCode::kInvalidArgument, "row count differs from label count");
  }
  if (!ids.empty() && ids.size() != rows.size()) {
    throw Error(ErrorCode::kInvalidArgument, "id count differs from row count");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != feature_names.size()) {
      throw Error(ErrorCode::kInvalidArgument, "row " + std::to_string(i) + " has wrong width");
    }
    for (double v : rows[i]) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite cell in row " + std::to_string(i));
      }
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw Error(ErrorCode::kInvalidArgument, "label must be 0 or 1");
    }
  }
}

Dataset Dataset::select_columns(std::span<const std::string> names) const {
  std::vector<std::size_t> cols;
  for (const auto& n : names) {
    auto it = std::find(feature_names.begin(), feature_names.end(), n);
    if (it == feature_names.end()) {
      throw Error(ErrorCode::kUnknownFeature, "'" + n + "' not in dataset");
    }
    cols.push_back(static_cast<std::size_t>(it - feature_names.begin()));
  }
  Dataset out;
  out.feature_names.assign(names.begin(), names.end());
  out.labels = labels;
  out.ids = ids;
  out.rows.reserve(rows.size());
  for (const auto& row : rows) {
    std::vector<double> r;
    r.reserve(cols.size());
    for (std::size_t c : cols) r.push_back(row[c]);
    out.rows.push_back(std::move(r));
  }
  return out;
}

void ForestConfig::validate() const {
  if (n_trees < 1) throw Error(ErrorCode::kInvalidConfig, "n_trees must be >= 1");
  if (min_samples_leaf < 1) throw Error(ErrorCode::kInvalidConfig, "min_samples_leaf must be >= 1");
  if (max_depth && *max_depth < 0) throw Error(ErrorCode::kInvalidConfig, "max_depth must be >= 0");
  if (features_per_split && *features_per_split < 1) {
    throw Error(ErrorCode::kInvalidConfig, "features_per_split must be >= 1");
  }
  if (threads < 0) throw Error(ErrorCode::kInvalidConfig, "threads must be >= 0");
}

ClassWeights balanced_weights(std::span<const int> labels) {
  std::array<std::size_t, kNumClasses> counts{};
  for (int y : labels) {
    if (y < 0 || y >= kNumClasses) throw Error(ErrorCode::kInvalidArgument, "label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  ClassWeights w{};
  const double n = static_cast<double>(labels.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorCode::kMissingClass, "class " + std::to_string(c) + " has no samples");
    }
    w[c] = n / (kNumClasses * static_cast<double>(counts[c]));
  }
  return w;
}

double weighted_gini(std::span<const double> weighted_counts) {
  double total = 0.0;
  for (double c : weighted_counts) {
    if (c < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative class count");
    total += c;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::kEmptyNode, "all class counts are zero");
  double sum_sq = 0.0;
  for (double c : weighted_counts) {
    const double p = c / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                      std::span<const int> features, const ClassWeights& weights,
                                      int min_samples_leaf) {
  if (samples.empty()) return std::nullopt;
  std::array<std::size_t, kNumClasses> total{};
  for (std::size_t s : samples) ++total[static_cast<std::size_t>(data.labels[s])];
  const double w0 = static_cast<double>(total[0]) * weights[0];
  const double w1 = static_cast<double>(total[1]) * weights[1];
  const double w = w0 + w1;
  const double parent = gini2(w0, w1);
  const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, min_samples_leaf));

  std::optional<SplitChoice> best;
  std::vector<std::pair<double, int>> column(samples.size());
  for (int f : features) {
    for (std::size_t k = 0; k < samples.size(); ++k) {
      column[k] = {data.rows[samples[k]][static_cast<std::size_t>(f)], data.labels[samples[k]]};
    }
    std::sort(column.begin(), column.end());
    std::array<std::size_t, kNumClasses> left{};
    for (std::size_t k = 0; k + 1 < column.size(); ++k) {
      ++left[static_cast<std::size_t>(column[k].second)];
      const double lo = column[k].first;
      const double hi = column[k + 1].first;
      if (!(lo < hi)) continue;
      const std::size_t n_left = k + 1;
      if (n_left < min_leaf || column.size() - n_left < min_leaf) continue;

      double threshold = lo + (hi - lo) / 2.0;
      if (threshold >= hi) threshold = lo;
      const double l0 = static_cast<double>(left[0]) * weights[0];
      const double l1 = static_cast<double>(left[1]) * weights[1];
      const double r0 = static_cast<double>(total[0] - left[0]) * weights[0];
      const double r1 = static_cast<double>(total[1] - left[1]) * weights[1];
      const double wl = l0 + l1;
      const double wr = r0 + r1;
      const double gain = parent - (wl / w) * gini2(l0, l1) - (wr / w) * gini2(r0, r1);
      SplitChoice cand{f, threshold, gain};
      if (!best || better_split(cand, *best)) best = cand;
    }
  }
  return best;
}

const TreeNode& DecisionTree::leaf_for(std::span<const double> x) const {
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left
                                                                                       : n.right);
  }
  return nodes[i];
}

double DecisionTree::predict_positive(std::span<const double> x) const {
  const auto& leaf = leaf_for(x);
  return leaf.counts[1] / (leaf.counts[0] + leaf.counts[1]);
}

std::size_t DecisionTree::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  std::size_t best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes[i].is_leaf()) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

ForestModel::Prediction ForestModel::predict_row(std::span<const double> x) const {
  double sum = 0.0;
  for (const auto& tree : trees) sum += tree.predict_positive(x);
  const double p = trees.empty() ? 0.0 : sum / static_cast<double>(trees.size());
  // Exact ties resolve to the positive class.
  return {p >= 0.5 ? 1 : 0, p};
}

ForestModel::Prediction ForestModel::predict(const FeatureVector& x) const {
  if (x.schema().names() != feature_names) {
    throw Error(ErrorCode::kSchemaMismatch, "feature vector schema differs from the model's");
  }
  return predict_row(x.values());
}

ForestModel train(const Dataset& input, const ForestConfig& cfg) {
  cfg.validate();
  input.validate();
  if (input.size() == 0) throw Error(ErrorCode::kMissingClass, "empty dataset");

  // Canonical row order.
  const auto order = canonical_order(input);
  Dataset data;
  data.feature_names = input.feature_names;
  data.rows.reserve(input.size());
  data.labels.reserve(input.size());
  for (std::size_t i : order) {
    data.rows.push_back(input.rows[i]);
    data.labels.push_back(input.labels[i]);
  }

  ClassWeights weights = balanced_weights(data.labels);
  if (cfg.class_weight == ClassWeightMode::kUniform) weights = {1.0, 1.0};

  const int d = static_cast<int>(data.num_features());
  int mtry = cfg.features_per_split.value_or(
      static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));
  mtry = std::clamp(mtry, 1, std::max(1, d));

  ForestModel model;
  model.feature_names = data.feature_names;
  model.config = cfg;
  model.class_weights = weights;
  model.trees.resize(static_cast<std::size_t>(cfg.n_trees));
  std::vector<std::vector<double>> per_tree(static_cast<std::size_t>(cfg.n_trees));

  const std::size_t n = data.size();
  auto grow = [&](std::size_t t) {
    TreeBuilder builder(data, cfg, weights, mtry, t);
    std::vector<std::size_t> samples(n);
    if (cfg.bootstrap) {
      for (auto& s : samples) s = static_cast<std::size_t>(builder.rng.uniform_index(n));
    } else {
      std::iota(samples.begin(), samples.end(), 0);
    }
    builder.build(std::move(samples), 0);
    model.trees[t] = std::move(builder.tree);
    per_tree[t] = std::move(builder.importance);
  };

  int threads = cfg.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::clamp(threads, 1, cfg.n_trees);
  if (threads == 1) {
    for (std::size_t t = 0; t < model.trees.size(); ++t) grow(t);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = static_cast<std::size_t>(w); t < model.trees.size();
             t += static_cast<std::size_t>(threads)) {
          grow(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Per-tree normalized decrease, averaged, renormalized.
  model.importances.assign(static_cast<std::size_t>(d), 0.0);
  for (const auto& imp : per_tree) {
    const double total = std::accumulate(imp.begin(), imp.end(), 0.0);
    if (!(total > 0.0)) continue;
    for (std::size_t f = 0; f < imp.size(); ++f) model.importances[f] += imp[f] / total;
  }
  const double grand = std::accumulate(model.importances.begin(), model.importances.end(), 0.0);
  if (grand > 0.0) {
    for (double& v : model.importances) v /= grand;
  }
  return model;
}

std::string serialize(const ForestModel& model) {
  nlohmann::json j;
  j["format"] = kFormatName;
  j["version"] = ForestModel::kFormatVersion;
  j["schema_version"] = model.schema_version;
  j["features"] = model.feature_names;
  j["config"] = config_to_json(model.config);
  j["class_weights"] = model.class_weights;
  j["importances"] = model.importances;
  auto trees = nlohmann::json::array();
  for (const auto& tree : model.trees) {
    auto nodes = nlohmann::json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.counts[0], n.counts[1]});
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  return j.dump() + "\n";
}

ForestModel deserialize(const std::string& document) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(document);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, e.what());
  }
  try {
    if (!j.is_object() || j.value("format", "") != kFormatName) {
      throw Error(ErrorCode::kCorruptModel, "not a posewatch forest document");
    }
    const int version = j.at("version").get<int>();
    if (version != ForestModel::kFormatVersion) {
      throw Error(ErrorCode::kVersionMismatch,
                  "model format version " + std::to_string(version) + ", expected " +
                      std::to_string(ForestModel::kFormatVersion));
    }
    ForestModel model;
    model.schema_version = j.at("schema_version").get<std::string>();
    model.feature_names = j.at("features").get<std::vector<std::string>>();
    model.config = config_from_json(j.at("config"));
    model.class_weights = j.at("class_weights").get<ClassWeights>();
    model.importances = j.at("importances").get<std::vector<double>>();
    const int d = static_cast<int>(model.feature_names.size());
    if (model.importances.size() != model.feature_names.size()) {
      throw Error(ErrorCode::kCorruptModel, "importance count differs from feature count");
    }
    for (const auto& jt : j.at("trees")) {
      DecisionTree tree;
      for (const auto& jn : jt) {
        if (!jn.is_array() || jn.size() != 6) throw Error(ErrorCode::kCorruptModel, "bad node");
        TreeNode n;
        n.feature = jn[0].get<int>();
        n.threshold = jn[1].get<double>();
        n.left = jn[2].get<int>();
        n.right = jn[3].get<int>();
        n.counts = {jn[4].get<double>(), jn[5].get<double>()};
        tree.nodes.push_back(n);
      }
      const int size = static_cast<int>(tree.nodes.size());
      if (size == 0) throw Error(ErrorCode::kCorruptModel, "empty tree");
      for (int i = 0; i < size; ++i) {
        const auto& n = tree.nodes[static_cast<std::size_t>(i)];
        if (n.counts[0] < 0.0 || n.counts[1] < 0.0 || !(n.counts[0] + n.counts[1] > 0.0)) {
          throw Error(ErrorCode::kCorruptModel, "invalid node counts");
        }
        if (n.is_leaf()) {
          if (n.left != -1 || n.right != -1) throw Error(ErrorCode::kCorruptModel, "leaf with children");
          continue;
        }
        if (n.feature >= d || n.left <= i || n.right <= i || n.left >= size || n.right >= size) {
          throw Error(ErrorCode::kCorruptModel, "node links out of range");
        }
      }
      model.trees.push_back(std::move(tree));
    }
    if (model.trees.empty() || static_cast<int>(model.trees.size()) != model.config.n_trees) {
      throw Error(ErrorCode::kCorruptModel, "tree count differs from n_trees");
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptModel, e.what());
  }
}

}  // namespace posewatch
