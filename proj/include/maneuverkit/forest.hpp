#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "maneuverkit/features.hpp"
#include "maneuverkit/rng.hpp"

namespace mkit {

/// Binary CART node: internal nodes route value <= threshold left,
/// > threshold right; leaves carry the majority label.
struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  std::unique_ptr<TreeNode> left, right;
  ManeuverLabel label = ManeuverLabel::u_turn;

  bool is_leaf() const { return feature < 0; }
};

struct ForestHyperparams {
  std::size_t n_trees = 100;
  std::optional<std::size_t> max_depth;  // unset: grow until pure
  std::size_t min_samples_split = 2;
  std::size_t max_features = 8;  // ceil(sqrt(60))
  std::uint64_t seed = 0;
  bool bootstrap = true;  // test hook; always on in production paths
};

struct ForestModel {
  std::vector<std::unique_ptr<TreeNode>> trees;
  ForestHyperparams hyperparams;
  std::vector<ManeuverLabel> class_list;
  std::size_t n_features = 0;
};

/// Gini impurity 1 - sum p_k^2 of a label multiset given as per-class
/// counts. Throws EmptyInput when all counts are zero.
double gini_impurity(std::span<const std::size_t> counts);

/// n with-replacement draws from [0, n), the bagging resample.
std::vector<std::size_t> bootstrap_indices(Rng& rng, std::size_t n);

/// Grow one CART tree over the given rows. At each node max_features
/// candidate features are sampled without replacement from the rng and the
/// split minimizing weighted child Gini over midpoint thresholds wins.
/// Ties everywhere break toward the lowest class index.
std::unique_ptr<TreeNode> train_tree(const Dataset& data,
                                     std::span<const std::size_t> rows,
                                     const ForestHyperparams& hp, Rng& rng);

/// Bagged forest: tree j trains on a bootstrap resample drawn from an rng
/// seeded with seed ^ j, so parallel and serial training agree.
/// Throws EmptyInput or SingleClass.
ForestModel train_forest(const Dataset& data, const ForestHyperparams& hp);

ManeuverLabel predict_tree(const TreeNode& node, std::span<const double> x);

/// Majority vote across trees; ties break toward the lowest class index.
/// Throws DimensionMismatch.
ManeuverLabel predict_forest(const ForestModel& model,
                             std::span<const double> x);

/// Single-document JSON serialization; round-trips preserve predictions
/// exactly.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);

}  // namespace mkit
