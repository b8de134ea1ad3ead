#include "uttlab/random_forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uttlab {

double gini(std::span<const double> class_weights) {
  double total = 0.0, sq = 0.0;
  for (double w : class_weights) {
    total += w;
    sq += w * w;
  }
  if (total <= 0.0) return 0.0;
  return 1.0 - sq / (total * total);
}

std::int32_t DecisionTree::apply(const SparseVector& x) const {
  std::int32_t n = 0;
  while (nodes[n].feature >= 0) {
    const TreeNode& node = nodes[n];
    n = x.get(static_cast<std::uint32_t>(node.feature)) <= node.threshold ? node.left : node.right;
  }
  return nodes[n].leaf;
}

int DecisionTree::predict_one(const SparseVector& x) const { return argmax(leaf_histogram(apply(x))); }

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t best = 0;
  std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [n, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (nodes[n].feature >= 0) {
      stack.emplace_back(nodes[n].left, d + 1);
      stack.emplace_back(nodes[n].right, d + 1);
    }
  }
  return best;
}

namespace {

struct Entry {
  double value;
  std::uint32_t pos;  // position within the node's sample list
};

class TreeBuilder {
 public:
  TreeBuilder(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
              std::span<const double> counts, int mtry, int min_split, Rng& rng)
      : X_(X), y_(y), K_(num_classes), counts_(counts), mtry_(mtry), min_split_(min_split),
        rng_(rng), d_(X.front().dimension), touch_count_(d_, 0), first_value_(d_, 0.0),
        varies_(d_, 0), slot_(d_, -1) {}

  DecisionTree build() {
    tree_.num_classes = K_;
    std::vector<std::uint32_t> root;
    for (std::size_t i = 0; i < X_.size(); ++i) {
      if (counts_[i] > 0.0) root.push_back(static_cast<std::uint32_t>(i));
    }
    tree_.nodes.emplace_back();
    struct Task {
      std::vector<std::uint32_t> samples;
      std::int32_t node;
    };
    std::vector<Task> stack;
    stack.push_back({std::move(root), 0});
    while (!stack.empty()) {
      Task task = std::move(stack.back());
      stack.pop_back();
      std::vector<std::uint32_t> left, right;
      if (split_node(task.samples, task.node, left, right)) {
        const auto l = static_cast<std::int32_t>(tree_.nodes.size());
        tree_.nodes.emplace_back();
        tree_.nodes.emplace_back();
        tree_.nodes[task.node].left = l;
        tree_.nodes[task.node].right = l + 1;
        stack.push_back({std::move(right), l + 1});
        stack.push_back({std::move(left), l});
      }
    }
    return std::move(tree_);
  }

 private:
  void make_leaf(std::int32_t node, const std::vector<double>& hist) {
    tree_.nodes[node].leaf = static_cast<std::int32_t>(tree_.leaf_counts.size() / K_);
    tree_.leaf_counts.insert(tree_.leaf_counts.end(), hist.begin(), hist.end());
  }

  // Columns that take at least two distinct values among the node's samples.
  std::vector<std::uint32_t> nonconstant_features(const std::vector<std::uint32_t>& samples) {
    std::vector<std::uint32_t> touched;
    for (std::uint32_t i : samples) {
      const SparseVector& x = X_[i];
      for (std::size_t k = 0; k < x.nnz(); ++k) {
        const std::uint32_t f = x.indices[k];
        if (touch_count_[f]++ == 0) {
          touched.push_back(f);
          first_value_[f] = x.values[k];
          varies_[f] = 0;
        } else if (x.values[k] != first_value_[f]) {
          varies_[f] = 1;
        }
      }
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t f : touched) {
      if (touch_count_[f] < samples.size() || varies_[f]) out.push_back(f);
      touch_count_[f] = 0;
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // Number of usable columns among mtry draws without replacement from all d
  // columns (hypergeometric), continuing past mtry until one usable column is hit.
  std::size_t usable_draws(std::size_t usable) {
    std::size_t found = 0;
    const std::size_t draws = std::min<std::size_t>(static_cast<std::size_t>(mtry_), d_);
    for (std::size_t t = 0; t < draws && found < usable; ++t) {
      if (rng_.below(d_ - t) < usable - found) ++found;
    }
    return std::max<std::size_t>(found, 1);
  }

  bool split_node(const std::vector<std::uint32_t>& samples, std::int32_t node,
                  std::vector<std::uint32_t>& left, std::vector<std::uint32_t>& right) {
    std::vector<double> hist(K_, 0.0);
    for (std::uint32_t i : samples) hist[y_[i]] += counts_[i];
    int populated = 0;
    for (double h : hist) populated += h > 0.0;
    if (populated <= 1 || samples.size() < static_cast<std::size_t>(min_split_)) {
      make_leaf(node, hist);
      return false;
    }

    std::vector<std::uint32_t> candidates = nonconstant_features(samples);
    if (candidates.empty()) {
      make_leaf(node, hist);
      return false;
    }
    const std::size_t k = std::min(usable_draws(candidates.size()), candidates.size());
    for (std::size_t j = 0; j < k; ++j) {
      const std::size_t r = j + rng_.below(candidates.size() - j);
      std::swap(candidates[j], candidates[r]);
    }
    candidates.resize(k);

    std::vector<std::vector<Entry>> buckets(k);
    for (std::size_t s = 0; s < k; ++s) slot_[candidates[s]] = static_cast<std::int32_t>(s);
    for (std::size_t p = 0; p < samples.size(); ++p) {
      const SparseVector& x = X_[samples[p]];
      for (std::size_t q = 0; q < x.nnz(); ++q) {
        const std::int32_t s = slot_[x.indices[q]];
        if (s >= 0) buckets[s].push_back({x.values[q], static_cast<std::uint32_t>(p)});
      }
    }
    for (std::uint32_t f : candidates) slot_[f] = -1;

    double best_proxy = -std::numeric_limits<double>::infinity();
    std::size_t best_slot = 0;
    double best_threshold = 0.0;
    bool found = false;

    std::vector<double> lw(K_), zero_w(K_);
    for (std::size_t s = 0; s < k; ++s) {
      auto& bucket = buckets[s];
      std::sort(bucket.begin(), bucket.end(), [](const Entry& a, const Entry& b) {
        return a.value != b.value ? a.value < b.value : a.pos < b.pos;
      });
      zero_w = hist;
      for (const Entry& e : bucket) zero_w[y_[samples[e.pos]]] -= counts_[samples[e.pos]];
      const bool has_zero = bucket.size() < samples.size();

      // Maximizing sum_c wl_c^2/W_L + sum_c wr_c^2/W_R minimizes the weighted Gini.
      std::fill(lw.begin(), lw.end(), 0.0);
      double left_sq = 0.0, right_sq = 0.0, wl = 0.0, total = 0.0;
      for (double h : hist) {
        right_sq += h * h;
        total += h;
      }
      auto move_left = [&](int c, double w) {
        const double before_l = lw[c], before_r = hist[c] - lw[c];
        lw[c] += w;
        const double after_r = hist[c] - lw[c];
        left_sq += lw[c] * lw[c] - before_l * before_l;
        right_sq += after_r * after_r - before_r * before_r;
        wl += w;
      };
      bool have_prev = false;
      double prev = 0.0;
      auto boundary = [&](double next) {
        if (!have_prev) return;
        const double t = prev + (next - prev) / 2.0;
        if (!(prev < t && t < next)) return;
        const double wr = total - wl;
        const double proxy = left_sq / wl + right_sq / wr;
        if (proxy > best_proxy) {
          best_proxy = proxy;
          best_slot = s;
          best_threshold = t;
          found = true;
        }
      };
      auto add_zero_group = [&] {
        boundary(0.0);
        for (int c = 0; c < K_; ++c) {
          if (zero_w[c] > 0.0) move_left(c, zero_w[c]);
        }
        prev = 0.0;
        have_prev = true;
      };

      bool zero_done = !has_zero;
      for (std::size_t e = 0; e < bucket.size();) {
        const double v = bucket[e].value;
        if (!zero_done && v > 0.0) {
          add_zero_group();
          zero_done = true;
        }
        boundary(v);
        for (; e < bucket.size() && bucket[e].value == v; ++e) {
          const std::uint32_t i = samples[bucket[e].pos];
          move_left(y_[i], counts_[i]);
        }
        prev = v;
        have_prev = true;
      }
      if (!zero_done) add_zero_group();
    }

    if (!found) {
      make_leaf(node, hist);
      return false;
    }

    const bool zero_goes_left = 0.0 <= best_threshold;
    std::vector<char> goes_left(samples.size(), zero_goes_left ? 1 : 0);
    for (const Entry& e : buckets[best_slot]) goes_left[e.pos] = e.value <= best_threshold;
    for (std::size_t p = 0; p < samples.size(); ++p) {
      (goes_left[p] ? left : right).push_back(samples[p]);
    }
    TreeNode& n = tree_.nodes[node];
    n.feature = static_cast<std::int32_t>(candidates[best_slot]);
    n.threshold = best_threshold;
    return true;
  }

  std::span<const SparseVector> X_;
  std::span<const int> y_;
  int K_;
  std::span<const double> counts_;
  int mtry_;
  int min_split_;
  Rng& rng_;
  std::size_t d_;
  std::vector<std::uint32_t> touch_count_;
  std::vector<double> first_value_;
  std::vector<char> varies_;
  std::vector<std::int32_t> slot_;
  DecisionTree tree_;
};

}  // namespace

DecisionTree grow_tree(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                       std::span<const double> sample_counts, int features_per_split,
                       int min_samples_split, Rng& rng) {
  validate_training_set(X, y, num_classes);
  if (sample_counts.size() != X.size()) throw ValidationError("sample_counts length mismatch");
  if (features_per_split < 1) throw ValidationError("features_per_split must be >= 1");
  return TreeBuilder(X, y, num_classes, sample_counts, features_per_split,
                     std::max(2, min_samples_split), rng)
      .build();
}

ForestModel train_random_forest(std::span<const SparseVector> X, std::span<const int> y,
                                int num_classes, const ForestParams& params, std::uint64_t seed,
                                Exec exec) {
  const std::size_t d = validate_training_set(X, y, num_classes);
  if (params.n_trees < 1) throw ValidationError("n_trees must be >= 1");

  ForestModel forest;
  forest.num_classes = num_classes;
  forest.dimension = d;
  forest.seed = seed;
  forest.params = params;
  forest.features_per_split =
      params.max_features > 0
          ? params.max_features
          : std::max(1, static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d)))));
  forest.trees.resize(params.n_trees);

  const std::size_t n = X.size();
  auto grow = [&](int t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    std::vector<double> counts(n, params.bootstrap ? 0.0 : 1.0);
    if (params.bootstrap) {
      for (std::size_t draw = 0; draw < n; ++draw) counts[rng.below(n)] += 1.0;
    }
    forest.trees[t] = TreeBuilder(X, y, num_classes, counts, forest.features_per_split,
                                  std::max(2, params.min_samples_split), rng)
                          .build();
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int t = 0; t < params.n_trees; ++t) grow(t);
  } else {
    for (int t = 0; t < params.n_trees; ++t) grow(t);
  }
  return forest;
}

void ForestModel::decision(const SparseVector& x, std::span<double> scores) const {
  check_dimension(x, dimension);
  std::fill(scores.begin(), scores.end(), 0.0);
  for (const auto& tree : trees) scores[tree.predict_one(x)] += 1.0;
}

int ForestModel::predict_one(const SparseVector& x) const {
  std::vector<double> scores(num_classes);
  decision(x, scores);
  return argmax(scores);
}

}  // namespace uttlab
