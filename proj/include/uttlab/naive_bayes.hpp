#pragma once

#include <span>
#include <vector>

#include "uttlab/learner_common.hpp"

namespace uttlab {

struct NaiveBayesParams {
  double alpha = 1.0;
};

/// Multinomial naive Bayes over non-negative (possibly fractional) feature
/// weights. log_likelihood is row-major [class][term].
struct NaiveBayesModel {
  int num_classes = 0;
  std::size_t dimension = 0;
  double alpha = 1.0;
  std::vector<double> log_prior;  // -inf for classes with no training mass
  std::vector<double> log_likelihood;

  /// Joint log-probability log P(c) + sum_t x_t log P(t|c) for every class.
  void decision(const SparseVector& x, std::span<double> scores) const;
  int predict_one(const SparseVector& x) const;
};

/// likelihood(t|c) = (sum of t's weight in c + alpha) / (total weight in c + alpha*V).
/// sample_weight, when given, scales each row's contribution to both the class
/// mass and the term counts.
NaiveBayesModel train_naive_bayes(std::span<const SparseVector> X, std::span<const int> y,
                                  int num_classes, const NaiveBayesParams& params = {},
                                  std::span<const double> sample_weight = {});

}  // namespace uttlab
