#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uttlab/label_matrix.hpp"

namespace uttlab {

struct ConfusionCounts {
  std::vector<std::size_t> tp, fp, fn, support;

  std::size_t classes() const { return tp.size(); }
};

/// Per-column binary counts. Throws on shape or universe mismatch.
ConfusionCounts confusion_counts(const LabelMatrix& truth, const LabelMatrix& pred);
/// Single-label sequences over num_classes classes.
ConfusionCounts confusion_counts(std::span<const int> truth, std::span<const int> pred,
                                 int num_classes);

/// TP / (TP + (FP + FN) / 2), with 0/0 taken as 0.
double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

enum class WeightSource { evaluation, training };

std::string_view to_string(WeightSource source);
WeightSource parse_weight_source(std::string_view name);

struct F1Scores {
  std::vector<double> per_class;
  double macro = 0.0;     // unweighted mean over every class
  double weighted = 0.0;  // support-weighted, weights normalized to sum 1
};

/// training_support is required when source == training. Weighted F1 is 0 if
/// every support is 0.
F1Scores f1_scores(const ConfusionCounts& counts, WeightSource source = WeightSource::evaluation,
                   std::span<const std::size_t> training_support = {});

/// Exact-match fraction. Throws on length mismatch or empty input.
double accuracy(std::span<const int> truth, std::span<const int> pred);
/// Row-wise exact match (equal to the above for one-hot matrices).
double accuracy(const LabelMatrix& truth, const LabelMatrix& pred);

/// Mean of xor over all N*L cells.
double hamming_loss(const LabelMatrix& truth, const LabelMatrix& pred);

/// Most frequent label among training label sets; ties go to the
/// lexicographically smallest. Throws on empty input.
std::string majority_baseline(std::span<const std::vector<std::string>> train_labels);

/// One report line. Metrics are percentages; exactly one of acc / hl is set.
struct MetricsRow {
  std::string task;
  std::string model;
  std::optional<std::uint64_t> seed;
  double w_f1 = 0.0;
  double m_f1 = 0.0;
  std::optional<double> acc;
  std::optional<double> hl;

  bool operator==(const MetricsRow&) const = default;
};

MetricsRow compute_metrics_row(const std::string& task, const std::string& model,
                               std::optional<std::uint64_t> seed, const LabelMatrix& truth,
                               const LabelMatrix& pred, bool multilabel,
                               WeightSource source = WeightSource::evaluation,
                               std::span<const std::size_t> training_support = {});

struct Summary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single run
};

struct AggregateRow {
  std::string task;
  std::string model;
  std::size_t n_runs = 0;
  Summary w_f1;
  Summary m_f1;
  std::optional<Summary> acc;
  std::optional<Summary> hl;
};

/// Throws on an empty list or rows of differing (task, model).
AggregateRow aggregate_runs(std::span<const MetricsRow> rows);

Summary summarize(std::span<const double> values);

/// Half-up rounding to `decimals` places, robust to binary representation
/// (45.235 -> 45.24).
double round_half_up(double x, int decimals = 2);
/// round_half_up then fixed two-decimal text.
std::string fmt2(double x);

}  // namespace uttlab
