#pragma once

#include <span>
#include <vector>

#include "uttlab/naive_bayes.hpp"

namespace uttlab {

struct AdaBoostParams {
  int n_estimators = 50;
  double learning_rate = 0.1;
  double nb_alpha = 1.0;
};

/// Discrete multiclass boosting (SAMME) over naive Bayes weak learners.
struct AdaBoostModel {
  int num_classes = 0;
  std::size_t dimension = 0;
  double learning_rate = 0.1;
  int max_estimators = 50;
  std::vector<NaiveBayesModel> estimators;
  std::vector<double> alphas;  // all > 0

  /// Weighted votes: score[k] = sum of alpha over estimators predicting k.
  void decision(const SparseVector& x, std::span<double> scores) const;
  int predict_one(const SparseVector& x) const;
};

/// Model weight learning_rate * (ln((1-err)/err) + ln(K-1)).
double samme_alpha(double weighted_error, int num_classes, double learning_rate);

/// Multiplies the weights of misclassified items by exp(alpha) and renormalizes
/// to unit sum.
void samme_reweight(std::span<double> weights, std::span<const char> misclassified, double alpha);

/// Per-round bookkeeping, for inspection and tests.
struct BoostTrace {
  std::vector<double> errors;
  std::vector<std::vector<double>> weights;  // distribution after each reweighting
};

AdaBoostModel train_adaboost_nb(std::span<const SparseVector> X, std::span<const int> y,
                                int num_classes, const AdaBoostParams& params = {},
                                BoostTrace* trace = nullptr);

}  // namespace uttlab
