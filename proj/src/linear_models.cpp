#include "uttlab/linear_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uttlab/rng.hpp"

namespace uttlab {

void LinearModel::decision(const SparseVector& x, std::span<double> scores) const {
  check_dimension(x, dimension);
  auto output = [&](int o) {
    const double* w = &weights[static_cast<std::size_t>(o) * dimension];
    double s = bias[o];
    for (std::size_t k = 0; k < x.nnz(); ++k) s += w[x.indices[k]] * x.values[k];
    return s;
  };
  if (n_outputs == 1) {
    const double m = output(0);
    scores[0] = -m;
    scores[1] = m;
  } else {
    for (int o = 0; o < n_outputs; ++o) scores[o] = output(o);
  }
}

int LinearModel::predict_one(const SparseVector& x) const {
  std::vector<double> scores(num_classes);
  decision(x, scores);
  return argmax(scores);
}

// ---------------------------------------------------------------------------
// Hinge SGD

double sgd_optimal_t0(double lambda) {
  const double typw = std::sqrt(1.0 / std::sqrt(lambda));
  // Hinge dloss at margin -typw is -1, so the heuristic's max(1, dloss) is 1.
  const double eta0 = typw / 1.0;
  return 1.0 / (eta0 * lambda);
}

namespace {

struct BinaryFit {
  std::vector<double> w;
  double b = 0.0;
  int epochs = 0;
  bool converged = false;
};

BinaryFit fit_binary_hinge(std::span<const SparseVector> X, std::span<const double> target,
                           std::size_t d, const SgdParams& p, std::uint64_t seed) {
  const std::size_t n = X.size();
  BinaryFit fit;
  fit.w.assign(d, 0.0);
  double wscale = 1.0;
  const double t0 = sgd_optimal_t0(p.lambda);
  std::uint64_t t = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  int no_improvement = 0;

  Rng rng(seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < p.epochs; ++epoch) {
    rng.shuffle(order);
    double sumloss = 0.0;
    for (std::size_t i : order) {
      const SparseVector& x = X[i];
      double dot = 0.0;
      for (std::size_t k = 0; k < x.nnz(); ++k) dot += fit.w[x.indices[k]] * x.values[k];
      const double margin = wscale * dot + fit.b;
      const double yi = target[i];
      const double eta = sgd_learning_rate(p.lambda, t0, t);
      const double z = yi * margin;
      sumloss += std::max(0.0, 1.0 - z);
      const double update = z <= 1.0 ? eta * yi : 0.0;

      wscale *= std::max(0.0, 1.0 - eta * p.lambda);
      if (update != 0.0) {
        const double step = update / wscale;
        for (std::size_t k = 0; k < x.nnz(); ++k) fit.w[x.indices[k]] += step * x.values[k];
        fit.b += update * p.intercept_decay;
      }
      if (wscale < 1e-9) {
        for (double& v : fit.w) v *= wscale;
        wscale = 1.0;
      }
      ++t;
    }
    fit.epochs = epoch + 1;
    if (p.tol >= 0.0) {
      if (sumloss > best_loss - p.tol * static_cast<double>(n)) {
        ++no_improvement;
      } else {
        no_improvement = 0;
      }
      if (sumloss < best_loss) best_loss = sumloss;
      if (no_improvement >= p.n_iter_no_change) {
        fit.converged = true;
        break;
      }
    }
  }
  for (double& v : fit.w) v *= wscale;
  return fit;
}

}  // namespace

LinearModel train_sgd_svm(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                          const SgdParams& params, std::uint64_t seed) {
  const std::size_t d = validate_training_set(X, y, num_classes);
  if (params.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(params.lambda > 0.0)) throw ValidationError("SGD lambda must be > 0");

  LinearModel m;
  m.kind = LinearKind::hinge_sgd;
  m.num_classes = num_classes;
  m.dimension = d;
  m.lambda = params.lambda;
  m.n_outputs = num_classes == 2 ? 1 : num_classes;
  m.weights.assign(static_cast<std::size_t>(m.n_outputs) * d, 0.0);
  m.bias.assign(m.n_outputs, 0.0);

  std::vector<int> seen(num_classes, 0);
  for (int c : y) seen[c] = 1;
  if (std::accumulate(seen.begin(), seen.end(), 0) == 1) {
    // One observed class: a constant decision in its favour.
    const int only = y.front();
    if (m.n_outputs == 1) {
      m.bias[0] = only == 1 ? 1.0 : -1.0;
    } else {
      for (int o = 0; o < m.n_outputs; ++o) m.bias[o] = o == only ? 1.0 : -1.0;
    }
    m.converged = true;
    return m;
  }

  std::vector<double> target(X.size());
  m.converged = true;
  for (int o = 0; o < m.n_outputs; ++o) {
    const int positive = m.n_outputs == 1 ? 1 : o;
    for (std::size_t i = 0; i < X.size(); ++i) target[i] = y[i] == positive ? 1.0 : -1.0;
    BinaryFit fit = fit_binary_hinge(X, target, d, params, derive_seed(seed, static_cast<std::uint64_t>(o)));
    std::copy(fit.w.begin(), fit.w.end(), m.weights.begin() + static_cast<std::ptrdiff_t>(o * d));
    m.bias[o] = fit.b;
    m.iterations = std::max(m.iterations, fit.epochs);
    m.converged = m.converged && fit.converged;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Logistic regression

SoftmaxObjective::SoftmaxObjective(std::span<const SparseVector> X, std::span<const int> y,
                                   int num_classes, double lambda)
    : X_(X), y_(y), K_(num_classes), d_(validate_training_set(X, y, num_classes)), lambda_(lambda) {}

double SoftmaxObjective::evaluate(std::span<const double> theta, std::span<double> grad) const {
  const std::size_t K = static_cast<std::size_t>(K_);
  const double* W = theta.data();
  const double* b = theta.data() + K * d_;
  std::fill(grad.begin(), grad.end(), 0.0);
  double* gW = grad.data();
  double* gb = grad.data() + K * d_;

  const double inv_n = 1.0 / static_cast<double>(X_.size());
  std::vector<double> z(K);
  double loss = 0.0;
  for (std::size_t i = 0; i < X_.size(); ++i) {
    const SparseVector& x = X_[i];
    double zmax = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < K; ++k) {
      double s = b[k];
      const double* w = W + k * d_;
      for (std::size_t q = 0; q < x.nnz(); ++q) s += w[x.indices[q]] * x.values[q];
      z[k] = s;
      zmax = std::max(zmax, s);
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += std::exp(z[k] - zmax);
    const double lse = zmax + std::log(sum);
    const auto yi = static_cast<std::size_t>(y_[i]);
    loss += lse - z[yi];
    for (std::size_t k = 0; k < K; ++k) {
      const double g = (std::exp(z[k] - lse) - (k == yi ? 1.0 : 0.0)) * inv_n;
      gb[k] += g;
      double* gw = gW + k * d_;
      for (std::size_t q = 0; q < x.nnz(); ++q) gw[x.indices[q]] += g * x.values[q];
    }
  }
  double reg = 0.0;
  for (std::size_t j = 0; j < K * d_; ++j) {
    reg += W[j] * W[j];
    gW[j] += lambda_ * W[j];
  }
  return loss * inv_n + 0.5 * lambda_ * reg;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

LinearModel train_logreg(std::span<const SparseVector> X, std::span<const int> y, int num_classes,
                         const LogRegParams& params, LogRegTrace* trace) {
  const double lambda = params.lambda < 0.0 ? 1.0 / static_cast<double>(X.size()) : params.lambda;
  if (params.max_iter < 0) throw ValidationError("max_iter must be >= 0");
  SoftmaxObjective objective(X, y, num_classes, lambda);
  const std::size_t n_params = objective.size();
  const std::size_t K = static_cast<std::size_t>(num_classes);
  const std::size_t d = X.front().dimension;

  std::vector<double> theta(n_params, 0.0), grad(n_params), next(n_params), next_grad(n_params);
  double f = objective.evaluate(theta, grad);
  double gnorm = std::sqrt(dot(grad, grad));
  if (trace) trace->objective.push_back(f);

  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-16;
  double step = 1.0;
  int iterations = 0;
  bool converged = gnorm <= params.tol;

  while (!converged && iterations < params.max_iter) {
    double s = step;
    double f_next = 0.0;
    bool accepted = false;
    while (true) {
      for (std::size_t j = 0; j < n_params; ++j) next[j] = theta[j] - s * grad[j];
      f_next = objective.evaluate(next, next_grad);
      if (f_next <= f - kArmijo * s * gnorm * gnorm) {
        accepted = true;
        break;
      }
      s *= 0.5;
      if (s < kMinStep) break;
    }
    if (!accepted) {
      if (f_next > f) {
        throw TrainingError("logistic regression: objective increased even with a minimal step");
      }
      break;  // stalled at floating-point resolution
    }

    double sy = 0.0, ss = 0.0;
    for (std::size_t j = 0; j < n_params; ++j) {
      const double sd = next[j] - theta[j];
      sy += sd * (next_grad[j] - grad[j]);
      ss += sd * sd;
    }
    step = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e6) : std::min(2.0 * s, 1e6);

    theta.swap(next);
    grad.swap(next_grad);
    f = f_next;
    gnorm = std::sqrt(dot(grad, grad));
    ++iterations;
    if (trace) trace->objective.push_back(f);
    converged = gnorm <= params.tol;
  }

  LinearModel m;
  m.kind = LinearKind::logistic;
  m.num_classes = num_classes;
  m.dimension = d;
  m.n_outputs = num_classes;
  m.lambda = lambda;
  m.weights.assign(theta.begin(), theta.begin() + static_cast<std::ptrdiff_t>(K * d));
  m.bias.assign(theta.begin() + static_cast<std::ptrdiff_t>(K * d), theta.end());
  m.iterations = iterations;
  m.converged = converged;
  m.gradient_norm = gnorm;
  return m;
}

}  // namespace uttlab
