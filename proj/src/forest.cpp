#include "maneuverkit/forest.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "maneuverkit/error.hpp"

namespace mkit {

namespace {

using nlohmann::json;

std::array<std::size_t, kNumLabels> count_labels(
    const Dataset& data, std::span<const std::size_t> rows) {
  std::array<std::size_t, kNumLabels> counts{};
  for (std::size_t r : rows) {
    counts[static_cast<int>(data.rows[r].label)]++;
  }
  return counts;
}

ManeuverLabel majority_label(const std::array<std::size_t, kNumLabels>& counts) {
  // ties break toward the lowest class index
  int best = 0;
  for (int k = 1; k < kNumLabels; ++k) {
    if (counts[k] > counts[best]) best = k;
  }
  return static_cast<ManeuverLabel>(best);
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double weighted_gini = std::numeric_limits<double>::infinity();
};

double gini_from_counts(const std::array<std::size_t, kNumLabels>& counts,
                        std::size_t n) {
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

/// Best midpoint threshold for one feature, by weighted child Gini.
void scan_feature(const Dataset& data, std::span<const std::size_t> rows,
                  int feature, SplitChoice& best) {
  const std::size_t n = rows.size();
  std::vector<std::pair<double, int>> vals;  // (value, class)
  vals.reserve(n);
  for (std::size_t r : rows) {
    vals.emplace_back(data.rows[r].values[static_cast<std::size_t>(feature)],
                      static_cast<int>(data.rows[r].label));
  }
  std::sort(vals.begin(), vals.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  std::array<std::size_t, kNumLabels> left{};
  std::array<std::size_t, kNumLabels> right{};
  for (const auto& [v, c] : vals) right[c]++;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    left[vals[i].second]++;
    right[vals[i].second]--;
    if (vals[i].first == vals[i + 1].first) continue;
    const double threshold = (vals[i].first + vals[i + 1].first) / 2.0;
    const std::size_t nl = i + 1, nr = n - nl;
    const double weighted =
        (static_cast<double>(nl) * gini_from_counts(left, nl) +
         static_cast<double>(nr) * gini_from_counts(right, nr)) /
        static_cast<double>(n);
    if (weighted < best.weighted_gini) {
      best = {feature, threshold, weighted};
    }
  }
}

std::unique_ptr<TreeNode> grow(const Dataset& data,
                               std::vector<std::size_t>& rows,
                               const ForestHyperparams& hp, Rng& rng,
                               std::size_t depth) {
  const auto counts = count_labels(data, rows);
  auto leaf = [&] {
    auto node = std::make_unique<TreeNode>();
    node->label = majority_label(counts);
    return node;
  };

  const double parent_gini = gini_from_counts(counts, rows.size());
  if (parent_gini == 0.0) return leaf();
  if (hp.max_depth && depth >= *hp.max_depth) return leaf();
  if (rows.size() < hp.min_samples_split) return leaf();

  const std::size_t d = data.feature_names.size();
  const std::size_t k = std::min(hp.max_features, d);
  SplitChoice best;
  for (std::size_t f : rng.sample_indices(d, k)) {
    scan_feature(data, rows, static_cast<int>(f), best);
  }
  if (best.feature < 0 || best.weighted_gini >= parent_gini - 1e-12) {
    return leaf();  // no split reduces impurity
  }

  std::vector<std::size_t> left_rows, right_rows;
  for (std::size_t r : rows) {
    const double v = data.rows[r].values[static_cast<std::size_t>(best.feature)];
    (v <= best.threshold ? left_rows : right_rows).push_back(r);
  }
  rows.clear();
  rows.shrink_to_fit();

  auto node = std::make_unique<TreeNode>();
  node->feature = best.feature;
  node->threshold = best.threshold;
  node->left = grow(data, left_rows, hp, rng, depth + 1);
  node->right = grow(data, right_rows, hp, rng, depth + 1);
  return node;
}

json tree_to_json(const TreeNode& node) {
  if (node.is_leaf()) {
    return json{{"leaf", name(node.label)}};
  }
  return json{{"feature", node.feature},
              {"threshold", node.threshold},
              {"left", tree_to_json(*node.left)},
              {"right", tree_to_json(*node.right)}};
}

std::unique_ptr<TreeNode> tree_from_json(const json& j) {
  auto node = std::make_unique<TreeNode>();
  if (j.contains("leaf")) {
    const auto label = label_from_name(j.at("leaf").get<std::string>());
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "model leaf carries unknown label '" +
                      j.at("leaf").get<std::string>() + "'");
    }
    node->label = *label;
    return node;
  }
  node->feature = j.at("feature").get<int>();
  node->threshold = j.at("threshold").get<double>();
  node->left = tree_from_json(j.at("left"));
  node->right = tree_from_json(j.at("right"));
  return node;
}

}  // namespace

double gini_impurity(std::span<const std::size_t> counts) {
  std::size_t n = 0;
  for (std::size_t c : counts) n += c;
  if (n == 0) {
    throw Error(ErrorCode::EmptyInput, "gini impurity of an empty multiset");
  }
  double sum_sq = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

std::vector<std::size_t> bootstrap_indices(Rng& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) {
    idx[i] = static_cast<std::size_t>(rng.below(n));
  }
  return idx;
}

std::unique_ptr<TreeNode> train_tree(const Dataset& data,
                                     std::span<const std::size_t> rows,
                                     const ForestHyperparams& hp, Rng& rng) {
  if (rows.empty()) {
    throw Error(ErrorCode::EmptyInput, "cannot train a tree on zero rows");
  }
  std::vector<std::size_t> owned(rows.begin(), rows.end());
  return grow(data, owned, hp, rng, 0);
}

ForestModel train_forest(const Dataset& data, const ForestHyperparams& hp) {
  if (data.rows.size() < 2) {
    throw Error(ErrorCode::EmptyInput,
                "forest training needs >= 2 rows, got " +
                    std::to_string(data.rows.size()));
  }
  ForestModel model;
  model.hyperparams = hp;
  model.class_list = data.class_list();
  model.n_features = data.feature_names.size();
  if (model.class_list.size() < 2) {
    throw Error(ErrorCode::SingleClass,
                "forest training needs >= 2 classes");
  }

  const std::size_t n = data.rows.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  model.trees.reserve(hp.n_trees);
  for (std::size_t j = 0; j < hp.n_trees; ++j) {
    Rng rng(hp.seed ^ static_cast<std::uint64_t>(j));
    if (hp.bootstrap) {
      const std::vector<std::size_t> sample = bootstrap_indices(rng, n);
      model.trees.push_back(train_tree(data, sample, hp, rng));
    } else {
      model.trees.push_back(train_tree(data, all, hp, rng));
    }
  }
  return model;
}

ManeuverLabel predict_tree(const TreeNode& node, std::span<const double> x) {
  const TreeNode* cur = &node;
  while (!cur->is_leaf()) {
    cur = x[static_cast<std::size_t>(cur->feature)] <= cur->threshold
              ? cur->left.get()
              : cur->right.get();
  }
  return cur->label;
}

ManeuverLabel predict_forest(const ForestModel& model,
                             std::span<const double> x) {
  if (x.size() != model.n_features) {
    throw Error(ErrorCode::DimensionMismatch,
                "expected " + std::to_string(model.n_features) +
                    " features, got " + std::to_string(x.size()));
  }
  std::array<std::size_t, kNumLabels> votes{};
  for (const auto& tree : model.trees) {
    votes[static_cast<int>(predict_tree(*tree, x))]++;
  }
  ManeuverLabel best = model.class_list.front();
  std::size_t best_votes = votes[static_cast<int>(best)];
  for (ManeuverLabel label : model.class_list) {
    if (votes[static_cast<int>(label)] > best_votes) {
      best = label;
      best_votes = votes[static_cast<int>(label)];
    }
  }
  return best;
}

std::string forest_to_json(const ForestModel& model) {
  json j;
  j["model"] = "forest";
  j["n_features"] = model.n_features;
  json hp;
  hp["n_trees"] = model.hyperparams.n_trees;
  if (model.hyperparams.max_depth) hp["max_depth"] = *model.hyperparams.max_depth;
  hp["min_samples_split"] = model.hyperparams.min_samples_split;
  hp["max_features"] = model.hyperparams.max_features;
  hp["seed"] = model.hyperparams.seed;
  j["hyperparams"] = std::move(hp);
  json classes = json::array();
  for (ManeuverLabel label : model.class_list) classes.push_back(name(label));
  j["class_list"] = std::move(classes);
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(tree_to_json(*tree));
  j["trees"] = std::move(trees);
  return j.dump();
}

ForestModel forest_from_json(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("model", "") != "forest") {
    throw Error(ErrorCode::MalformedRecord, "not a forest model document");
  }
  ForestModel model;
  model.n_features = j.at("n_features").get<std::size_t>();
  const json& hp = j.at("hyperparams");
  model.hyperparams.n_trees = hp.at("n_trees").get<std::size_t>();
  if (hp.contains("max_depth")) {
    model.hyperparams.max_depth = hp.at("max_depth").get<std::size_t>();
  }
  model.hyperparams.min_samples_split =
      hp.at("min_samples_split").get<std::size_t>();
  model.hyperparams.max_features = hp.at("max_features").get<std::size_t>();
  model.hyperparams.seed = hp.at("seed").get<std::uint64_t>();
  for (const json& c : j.at("class_list")) {
    const auto label = label_from_name(c.get<std::string>());
    if (!label) {
      throw Error(ErrorCode::LabelUnknown,
                  "model class list carries unknown label '" +
                      c.get<std::string>() + "'");
    }
    model.class_list.push_back(*label);
  }
  for (const json& t : j.at("trees")) {
    model.trees.push_back(tree_from_json(t));
  }
  if (model.trees.empty() || model.class_list.empty()) {
    throw Error(ErrorCode::MalformedRecord, "forest model document incomplete");
  }
  return model;
}

}  // namespace mkit
