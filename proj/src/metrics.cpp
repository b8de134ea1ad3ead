#include "uttlab/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "uttlab/error.hpp"

namespace uttlab {

ConfusionCounts confusion_counts(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_same_shape(truth, pred);
  ConfusionCounts c;
  c.tp.assign(truth.cols, 0);
  c.fp.assign(truth.cols, 0);
  c.fn.assign(truth.cols, 0);
  c.support.assign(truth.cols, 0);
  for (std::size_t i = 0; i < truth.rows; ++i) {
    for (std::size_t j = 0; j < truth.cols; ++j) {
      const bool t = truth.at(i, j) != 0;
      const bool p = pred.at(i, j) != 0;
      c.support[j] += t;
      c.tp[j] += t && p;
      c.fp[j] += !t && p;
      c.fn[j] += t && !p;
    }
  }
  return c;
}

ConfusionCounts confusion_counts(std::span<const int> truth, std::span<const int> pred,
                                 int num_classes) {
  if (truth.size() != pred.size()) {
    throw ValidationError("shape mismatch: " + std::to_string(truth.size()) + " truth vs " +
                          std::to_string(pred.size()) + " predictions");
  }
  const auto K = static_cast<std::size_t>(num_classes);
  ConfusionCounts c;
  c.tp.assign(K, 0);
  c.fp.assign(K, 0);
  c.fn.assign(K, 0);
  c.support.assign(K, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = pred[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
      throw ValidationError("class id outside [0," + std::to_string(num_classes) + ")");
    }
    ++c.support[t];
    if (t == p) {
      ++c.tp[t];
    } else {
      ++c.fn[t];
      ++c.fp[p];
    }
  }
  return c;
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double denom = static_cast<double>(tp) + 0.5 * static_cast<double>(fp + fn);
  return denom == 0.0 ? 0.0 : static_cast<double>(tp) / denom;
}

std::string_view to_string(WeightSource source) {
  return source == WeightSource::training ? "training" : "evaluation";
}

WeightSource parse_weight_source(std::string_view name) {
  if (name == "evaluation") return WeightSource::evaluation;
  if (name == "training") return WeightSource::training;
  throw ConfigError("weight_source must be \"evaluation\" or \"training\", got \"" +
                    std::string(name) + "\"");
}

F1Scores f1_scores(const ConfusionCounts& counts, WeightSource source,
                   std::span<const std::size_t> training_support) {
  const std::size_t N = counts.classes();
  if (N == 0) throw ValidationError("f1_scores needs at least one class");
  std::span<const std::size_t> support = counts.support;
  if (source == WeightSource::training) {
    if (training_support.size() != N) {
      throw ValidationError("training supports have " + std::to_string(training_support.size()) +
                            " entries for " + std::to_string(N) + " classes");
    }
    support = training_support;
  }
  F1Scores out;
  out.per_class.resize(N);
  double total = 0.0;
  for (std::size_t i = 0; i < N; ++i) total += static_cast<double>(support[i]);
  for (std::size_t i = 0; i < N; ++i) {
    const double f = f1_from_counts(counts.tp[i], counts.fp[i], counts.fn[i]);
    out.per_class[i] = f;
    out.macro += f;
    if (total > 0.0) out.weighted += static_cast<double>(support[i]) / total * f;
  }
  out.macro /= static_cast<double>(N);
  return out;
}

double accuracy(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) {
    throw ValidationError("length mismatch: " + std::to_string(truth.size()) + " vs " +
                          std::to_string(pred.size()));
  }
  if (truth.empty()) throw ValidationError("accuracy of an empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == pred[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

double accuracy(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_same_shape(truth, pred);
  if (truth.rows == 0) throw ValidationError("accuracy of an empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.rows; ++i) {
    hits += std::equal(truth.row(i), truth.row(i) + truth.cols, pred.row(i));
  }
  return static_cast<double>(hits) / static_cast<double>(truth.rows);
}

double hamming_loss(const LabelMatrix& truth, const LabelMatrix& pred) {
  check_same_shape(truth, pred);
  const std::size_t cells = truth.rows * truth.cols;
  if (cells == 0) throw ValidationError("hamming loss of an empty matrix");
  std::size_t wrong = 0;
  for (std::size_t k = 0; k < cells; ++k) wrong += (truth.data[k] != 0) != (pred.data[k] != 0);
  return static_cast<double>(wrong) / static_cast<double>(cells);
}

std::string majority_baseline(std::span<const std::vector<std::string>> train_labels) {
  if (train_labels.empty()) throw ValidationError("majority baseline of empty training labels");
  std::map<std::string, std::size_t> freq;
  for (const auto& labels : train_labels) {
    for (const auto& l : labels) ++freq[l];
  }
  if (freq.empty()) throw ValidationError("majority baseline: training items carry no labels");
  // std::map iterates in lexicographic order, so the first maximum wins ties.
  auto best = freq.begin();
  for (auto it = freq.begin(); it != freq.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

MetricsRow compute_metrics_row(const std::string& task, const std::string& model,
                               std::optional<std::uint64_t> seed, const LabelMatrix& truth,
                               const LabelMatrix& pred, bool multilabel, WeightSource source,
                               std::span<const std::size_t> training_support) {
  const F1Scores f1 = f1_scores(confusion_counts(truth, pred), source, training_support);
  MetricsRow row;
  row.task = task;
  row.model = model;
  row.seed = seed;
  row.w_f1 = 100.0 * f1.weighted;
  row.m_f1 = 100.0 * f1.macro;
  if (multilabel) {
    row.hl = 100.0 * hamming_loss(truth, pred);
  } else {
    row.acc = 100.0 * accuracy(truth, pred);
  }
  return row;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

AggregateRow aggregate_runs(std::span<const MetricsRow> rows) {
  if (rows.empty()) throw ValidationError("aggregate_runs: no rows");
  AggregateRow out;
  out.task = rows.front().task;
  out.model = rows.front().model;
  out.n_runs = rows.size();
  std::vector<double> w, m, a, h;
  for (const auto& r : rows) {
    if (r.task != out.task || r.model != out.model) {
      throw ValidationError("aggregate_runs: mixed rows (" + out.task + ", " + out.model + ") and (" +
                            r.task + ", " + r.model + ")");
    }
    if (r.acc.has_value() != rows.front().acc.has_value()) {
      throw ValidationError("aggregate_runs: rows disagree on accuracy vs hamming loss");
    }
    w.push_back(r.w_f1);
    m.push_back(r.m_f1);
    if (r.acc) a.push_back(*r.acc);
    if (r.hl) h.push_back(*r.hl);
  }
  out.w_f1 = summarize(w);
  out.m_f1 = summarize(m);
  if (!a.empty()) out.acc = summarize(a);
  if (!h.empty()) out.hl = summarize(h);
  return out;
}

double round_half_up(double x, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = x * scale;
  // The small bias absorbs representation error such as 45.235 -> 45.23499...
  const double r = std::floor(std::abs(scaled) + 0.5 + 1e-7);
  return std::copysign(r, scaled) / scale;
}

std::string fmt2(double x) {
  double r = round_half_up(x, 2);
  if (r == 0.0) r = 0.0;  // no "-0.00"
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", r);
  return buf;
}

}  // namespace uttlab
