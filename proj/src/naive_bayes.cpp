#include "uttlab/naive_bayes.hpp"

#include <cmath>
#include <limits>

namespace uttlab {

NaiveBayesModel train_naive_bayes(std::span<const SparseVector> X, std::span<const int> y,
                                  int num_classes, const NaiveBayesParams& params,
                                  std::span<const double> sample_weight) {
  const std::size_t d = validate_training_set(X, y, num_classes);
  if (!(params.alpha > 0.0)) throw ValidationError("naive Bayes alpha must be > 0");
  if (!sample_weight.empty() && sample_weight.size() != X.size()) {
    throw ValidationError("sample_weight length does not match the training set");
  }

  const auto K = static_cast<std::size_t>(num_classes);
  std::vector<double> class_mass(K, 0.0);
  std::vector<double> counts(K * d, 0.0);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double w = sample_weight.empty() ? 1.0 : sample_weight[i];
    const auto c = static_cast<std::size_t>(y[i]);
    class_mass[c] += w;
    double* row = &counts[c * d];
    for (std::size_t k = 0; k < X[i].nnz(); ++k) {
      if (X[i].values[k] < 0.0) throw ValidationError("naive Bayes requires non-negative features");
      row[X[i].indices[k]] += w * X[i].values[k];
    }
  }

  NaiveBayesModel m;
  m.num_classes = num_classes;
  m.dimension = d;
  m.alpha = params.alpha;
  m.log_prior.resize(K);
  m.log_likelihood.resize(K * d);

  double total_mass = 0.0;
  for (double v : class_mass) total_mass += v;
  for (std::size_t c = 0; c < K; ++c) {
    m.log_prior[c] = class_mass[c] > 0.0 ? std::log(class_mass[c] / total_mass)
                                         : -std::numeric_limits<double>::infinity();
    double row_total = 0.0;
    for (std::size_t t = 0; t < d; ++t) row_total += counts[c * d + t];
    const double log_denom = std::log(row_total + params.alpha * static_cast<double>(d));
    for (std::size_t t = 0; t < d; ++t) {
      m.log_likelihood[c * d + t] = std::log(counts[c * d + t] + params.alpha) - log_denom;
    }
  }
  return m;
}

void NaiveBayesModel::decision(const SparseVector& x, std::span<double> scores) const {
  check_dimension(x, dimension);
  for (int c = 0; c < num_classes; ++c) {
    double s = log_prior[c];
    if (std::isfinite(s)) {
      const double* row = &log_likelihood[static_cast<std::size_t>(c) * dimension];
      for (std::size_t k = 0; k < x.nnz(); ++k) s += x.values[k] * row[x.indices[k]];
    }
    scores[c] = s;
  }
}

int NaiveBayesModel::predict_one(const SparseVector& x) const {
  std::vector<double> scores(num_classes);
  decision(x, scores);
  return argmax(scores);
}

}  // namespace uttlab
