#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posewatch/features.hpp"

namespace posewatch {

inline constexpr int kNumClasses = 2;
using ClassWeights = std::array<double, kNumClasses>;

// Row-major feature matrix with binary labels (1 = robbery).
struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  // Optional; when every row has a unique id, training sorts rows by id first
  // so the learned model does not depend on input order.
  std::vector<std::string> ids;

  std::size_t size() const { return rows.size(); }
  std::size_t num_features() const { return feature_names.size(); }
  // Throws InvalidArgument on shape problems or non-finite cells.
  void validate() const;
  // Keeps only `names` (in that order). Throws UnknownFeature.
  Dataset select_columns(std::span<const std::string> names) const;
};

enum class ClassWeightMode { kBalanced, kUniform };

struct ForestConfig {
  int n_trees = 500;
  std::uint64_t seed = 42;
  ClassWeightMode class_weight = ClassWeightMode::kBalanced;
  std::optional<int> max_depth;
  int min_samples_leaf = 1;
  // Features examined per split; nullopt means ceil(sqrt(d)).
  std::optional<int> features_per_split;
  bool bootstrap = true;
  // Worker threads for training; 0 picks hardware concurrency. Does not
  // affect the result.
  int threads = 1;

  void validate() const;
};

// weight_c = N / (K * N_c). Throws MissingClass.
ClassWeights balanced_weights(std::span<const int> labels);

// 1 - sum p_c^2. Throws EmptyNode when all counts are zero.
double weighted_gini(std::span<const double> weighted_counts);

struct TreeNode {
  int feature = -1;  // -1 for leaves
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::array<double, kNumClasses> counts{};  // weighted class counts at the node

  bool is_leaf() const { return feature < 0; }
};

// Flat CART tree; node 0 is the root. Samples go left when x <= threshold.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  const TreeNode& leaf_for(std::span<const double> x) const;
  // Weighted fraction of class 1 in the reached leaf.
  double predict_positive(std::span<const double> x) const;
  std::size_t depth() const;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;  // weighted impurity decrease, per unit of node weight
};

// Best weighted-Gini split of `samples` (row indices, repeats allowed) over
// `features`. Thresholds are midpoints between consecutive distinct values;
// gains within a relative 1e-12 count as ties, resolved toward the lower
// feature index and then the lower threshold. Splits leaving fewer than
// `min_samples_leaf` samples on a side are skipped. nullopt when no
// candidate exists.
std::optional<SplitChoice> best_split(const Dataset& data, std::span<const std::size_t> samples,
                                      std::span<const int> features, const ClassWeights& weights,
                                      int min_samples_leaf = 1);

struct ForestModel {
  static constexpr int kFormatVersion = 1;

  std::vector<std::string> feature_names;
  std::string schema_version{kSchemaVersion};
  ForestConfig config;
  ClassWeights class_weights{1.0, 1.0};
  std::vector<DecisionTree> trees;
  std::vector<double> importances;

  struct Prediction {
    int label = 0;
    double probability = 0.0;
  };

  // Mean of per-tree leaf fractions; label 1 iff probability >= 0.5.
  Prediction predict_row(std::span<const double> x) const;
  // Throws SchemaMismatch unless x uses exactly this model's features.
  Prediction predict(const FeatureVector& x) const;
};

// Throws MissingClass, InvalidArgument, InvalidConfig.
ForestModel train(const Dataset& data, const ForestConfig& cfg);

std::string serialize(const ForestModel& model);
// Throws CorruptModel, VersionMismatch.
ForestModel deserialize(const std::string& document);

}  // namespace posewatch
