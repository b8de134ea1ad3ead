#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uttlab/learner_common.hpp"

namespace uttlab {

enum class LinearKind { hinge_sgd, logistic };

struct SgdParams {
  int epochs = 1000;
  double lambda = 1e-4;
  /// Stop once the epoch's summed hinge loss fails to improve on the best by
  /// tol * n for n_iter_no_change consecutive epochs. tol < 0 disables it.
  double tol = 1e-3;
  int n_iter_no_change = 5;
  /// The intercept moves at this fraction of the weight step (sparse inputs).
  double intercept_decay = 0.01;
};

struct LogRegParams {
  double lambda = -1.0;  // < 0 selects 1/n
  int max_iter = 100;
  double tol = 1e-4;     // on the Euclidean norm of the full gradient
};

/// outputs o_k = w_k . x + b_k. A binary hinge model has one output and
/// reports scores (-o, o); every other model reports one score per class.
struct LinearModel {
  LinearKind kind = LinearKind::hinge_sgd;
  int num_classes = 0;
  std::size_t dimension = 0;
  int n_outputs = 0;
  std::vector<double> weights;  // row-major [output][feature]
  std::vector<double> bias;
  double lambda = 0.0;
  int iterations = 0;           // epochs (SGD) or accepted steps (logistic)
  bool converged = false;
  double gradient_norm = 0.0;   // logistic only

  void decision(const SparseVector& x, std::span<double> scores) const;
  int predict_one(const SparseVector& x) const;
};

/// t0 of the 'optimal' schedule: 1/(lambda * eta0) with eta0 = lambda^(-1/4)
/// (the typical-weight heuristic under hinge loss).
double sgd_optimal_t0(double lambda);
/// eta_t = 1 / (lambda * (t0 + t)), t counting updates from 0.
inline double sgd_learning_rate(double lambda, double t0, std::uint64_t t) {
  return 1.0 / (lambda * (t0 + static_cast<double>(t)));
}

/// Per-sample subgradient descent on the L2-regularized hinge loss, one-vs-rest
/// for more than two classes, a single model for two.
LinearModel train_sgd_svm(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                          const SgdParams& params, std::uint64_t seed);

/// Mean softmax negative log-likelihood + (lambda/2)||W||^2 (bias unpenalized).
/// theta = [W row-major (K x d), b (K)].
class SoftmaxObjective {
 public:
  SoftmaxObjective(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                   double lambda);

  std::size_t size() const { return static_cast<std::size_t>(K_) * (d_ + 1); }
  /// Returns the objective and writes its gradient into grad.
  double evaluate(std::span<const double> theta, std::span<double> grad) const;

 private:
  std::span<const SparseVector> X_;
  std::span<const int> y_;
  int K_;
  std::size_t d_;
  double lambda_;
};

struct LogRegTrace {
  std::vector<double> objective;  // value at the start and after each accepted step
};

/// Full-batch gradient descent with Armijo backtracking (Barzilai-Borwein trial
/// steps). Throws TrainingError if even a minimal step increases the objective.
LinearModel train_logreg(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                         const LogRegParams& params = {}, LogRegTrace* trace = nullptr);

}  // namespace uttlab
