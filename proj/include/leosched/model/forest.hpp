#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "leosched/model/features.hpp"

namespace leosched::model {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 0;  // 0 = unbounded
  int min_samples_split = 2;
  std::uint64_t seed = 1;
};

/// Flat tree. Leaves have feature == -1 and a sparse class histogram.
struct Tree {
  std::vector<int> feature;
  std::vector<double> threshold;  // go left when value <= threshold
  std::vector<int> left;
  std::vector<int> right;
  std::vector<std::vector<std::pair<int, int>>> counts;  // (class, count); leaves only
};

struct GridPoint {
  int n_trees = 0;
  int max_depth = 0;
  int min_samples_split = 0;
  double cv_top1 = 0.0;
};

struct HoldoutMetrics {
  int n = 0;
  std::vector<std::size_t> ks;
  std::vector<double> model;
  std::vector<double> baseline;
};

struct TrainingMetadata {
  int train_size = 0;
  std::vector<GridPoint> grid;  // every candidate, in grid order
  std::optional<HoldoutMetrics> holdout;
};

struct RandomForest {
  static constexpr int kFormatVersion = 1;

  ForestParams params;
  std::vector<ClusterKey> feature_keys;  // encoded features: counts per key, then t_local
  std::vector<ClusterKey> classes;       // sorted
  std::vector<Tree> trees;
  TrainingMetadata metadata;

  std::size_t feature_count() const { return feature_keys.size() + 1; }
  /// Dense encoding; counts for keys outside the encoding are dropped and
  /// tallied in `dropped` when given.
  std::vector<double> encode(const FeatureVector& f, int* dropped = nullptr) const;
  /// Mean of per-tree leaf class distributions, indexed like `classes`.
  std::vector<double> probabilities(const FeatureVector& f) const;
};

/// Fits a forest on the given slots. Classes and encoding come from `data`.
RandomForest fit_forest(const std::vector<LabeledSlot>& data, const ForestParams& params);

/// Ranked by probability, ties by key order; at most k entries.
std::vector<ClusterKey> predict_topk(const RandomForest& forest, const FeatureVector& f, std::size_t k);

struct TopkRow {
  std::size_t k = 0;
  double model = 0.0;
  double baseline = 0.0;
};

/// Throws std::invalid_argument on an empty dataset.
std::vector<TopkRow> evaluate_topk(const RandomForest& forest, const std::vector<LabeledSlot>& data,
                                   const std::vector<std::size_t>& ks);
std::string topk_csv(const std::vector<TopkRow>& rows);

struct GridSpec {
  std::vector<int> n_trees{50, 100, 200};
  std::vector<int> max_depth{4, 8, 16, 0};
  std::vector<int> min_samples_split{2, 5};
  int folds = 5;
  double holdout_fraction = 0.2;
};

struct TrainResult {
  RandomForest model;
  std::vector<LabeledSlot> holdout;
};

/// Stratified holdout split, grid search by mean k-fold CV top-1 accuracy,
/// refit of the winner on the training part, holdout metrics in metadata.
/// Throws std::invalid_argument with fewer than 100 slots or a single label.
TrainResult train(const std::vector<LabeledSlot>& data, const GridSpec& grid, std::uint64_t seed);

/// Stratified split of indices 0..n-1 into (train, holdout).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split(const std::vector<LabeledSlot>& data,
                                                                               double holdout_fraction,
                                                                               std::uint64_t seed);

std::string to_json(const RandomForest& forest);
/// Throws std::invalid_argument for malformed files or unknown versions.
RandomForest forest_from_json(const std::string& text);

}  // namespace leosched::model
