#include "uttlab/adaboost.hpp"

#include <cmath>

namespace uttlab {

double samme_alpha(double weighted_error, int num_classes, double learning_rate) {
  return learning_rate *
         (std::log((1.0 - weighted_error) / weighted_error) + std::log(num_classes - 1.0));
}

void samme_reweight(std::span<double> weights, std::span<const char> misclassified, double alpha) {
  const double factor = std::exp(alpha);
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (misclassified[i]) weights[i] *= factor;
    total += weights[i];
  }
  for (double& w : weights) w /= total;
}

AdaBoostModel train_adaboost_nb(std::span<const SparseVector> X, std::span<const int> y,
                                int num_classes, const AdaBoostParams& params, BoostTrace* trace) {
  validate_training_set(X, y, num_classes);
  if (params.n_estimators < 1) throw ValidationError("n_estimators must be >= 1");
  if (!(params.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");

  const std::size_t n = X.size();
  std::vector<char> seen(num_classes, 0);
  for (int c : y) seen[c] = 1;
  int observed = 0;
  for (char s : seen) observed += s;

  AdaBoostModel model;
  model.num_classes = num_classes;
  model.dimension = X.front().dimension;
  model.learning_rate = params.learning_rate;
  model.max_estimators = params.n_estimators;

  std::vector<double> weights(n, 1.0 / static_cast<double>(n));
  std::vector<double> scaled(n);
  std::vector<char> miss(n);
  const NaiveBayesParams nb_params{params.nb_alpha};

  for (int round = 0; round < params.n_estimators; ++round) {
    // The weak learner sees weights with mean 1 so the first round equals plain NB.
    for (std::size_t i = 0; i < n; ++i) scaled[i] = weights[i] * static_cast<double>(n);
    NaiveBayesModel nb = train_naive_bayes(X, y, num_classes, nb_params, scaled);

    double error = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      miss[i] = nb.predict_one(X[i]) != y[i];
      if (miss[i]) error += weights[i];
    }
    if (trace) trace->errors.push_back(error);

    if (error <= 0.0) {
      model.estimators.push_back(std::move(nb));
      model.alphas.push_back(1.0);
      break;
    }
    if (error >= 1.0 - 1.0 / observed) {
      if (model.estimators.empty()) {
        // Degenerate first round: fall back to the plain weak learner.
        model.estimators.push_back(std::move(nb));
        model.alphas.push_back(1.0);
      }
      break;
    }
    const double alpha = samme_alpha(error, observed, params.learning_rate);
    model.estimators.push_back(std::move(nb));
    model.alphas.push_back(alpha);
    samme_reweight(weights, miss, alpha);
    if (trace) trace->weights.push_back(weights);
  }
  return model;
}

void AdaBoostModel::decision(const SparseVector& x, std::span<double> scores) const {
  check_dimension(x, dimension);
  std::fill(scores.begin(), scores.end(), 0.0);
  for (std::size_t m = 0; m < estimators.size(); ++m) {
    scores[estimators[m].predict_one(x)] += alphas[m];
  }
}

int AdaBoostModel::predict_one(const SparseVector& x) const {
  std::vector<double> scores(num_classes);
  decision(x, scores);
  return argmax(scores);
}

}  // namespace uttlab
