#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uttlab/exec.hpp"
#include "uttlab/learner_common.hpp"
#include "uttlab/rng.hpp"

namespace uttlab {

struct ForestParams {
  int n_trees = 100;
  int max_features = 0;  // 0 selects ceil(sqrt(d))
  int min_samples_split = 2;
  bool bootstrap = true;
};

/// Internal nodes have feature >= 0 and send x[feature] <= threshold left.
/// Leaves have feature == -1 and index their class histogram via `leaf`.
struct TreeNode {
  std::int32_t feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  std::int32_t leaf = -1;

  bool operator==(const TreeNode&) const = default;
};

struct DecisionTree {
  int num_classes = 0;
  std::vector<TreeNode> nodes;       // nodes[0] is the root
  std::vector<double> leaf_counts;   // leaf k occupies [k*K, (k+1)*K)

  std::span<const double> leaf_histogram(std::int32_t leaf) const {
    return {leaf_counts.data() + static_cast<std::size_t>(leaf) * num_classes,
            static_cast<std::size_t>(num_classes)};
  }
  /// Leaf reached by x.
  std::int32_t apply(const SparseVector& x) const;
  int predict_one(const SparseVector& x) const;
  std::size_t depth() const;

  bool operator==(const DecisionTree&) const = default;
};

struct ForestModel {
  int num_classes = 0;
  std::size_t dimension = 0;
  int features_per_split = 1;
  std::uint64_t seed = 0;
  ForestParams params;
  std::vector<DecisionTree> trees;

  /// Vote counts per class; they sum to the number of trees.
  void decision(const SparseVector& x, std::span<double> scores) const;
  int predict_one(const SparseVector& x) const;
};

/// 1 - sum_c p_c^2 over the (weighted) class histogram; 0 for an empty histogram.
double gini(std::span<const double> class_weights);

/// Fully grows one CART tree with Gini splits. sample_counts[i] is the
/// multiplicity of row i (0 excludes it). At each node ceil(sqrt(d))-style
/// feature draws are made from all d columns; columns that are constant at
/// the node cannot split it, and if every drawn column is constant the draw
/// continues until a usable one is found.
DecisionTree grow_tree(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                       std::span<const double> sample_counts, int features_per_split,
                       int min_samples_split, Rng& rng);

/// Each tree draws its bootstrap sample and feature subsets from
/// derive_seed(seed, tree_index), so the forest is identical for any thread count.
ForestModel train_random_forest(std::span<const SparseVector> X, std::span<const int> y,
                                int num_classes, const ForestParams& params, std::uint64_t seed,
                                Exec exec = Exec::parallel);

}  // namespace uttlab
