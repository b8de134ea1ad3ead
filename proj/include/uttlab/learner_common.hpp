#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "uttlab/error.hpp"
#include "uttlab/text_features.hpp"

namespace uttlab {

/// Checks |X| = |y| >= 1, a common feature dimension, and 0 <= y < num_classes.
/// Returns the feature dimension.
inline std::size_t validate_training_set(std::span<const SparseVector> X, std::span<const int> y,
                                         int num_classes) {
  if (X.empty()) throw ValidationError("empty training set");
  if (X.size() != y.size()) {
    throw ValidationError("dimension mismatch: " + std::to_string(X.size()) + " feature rows vs " +
                          std::to_string(y.size()) + " labels");
  }
  if (num_classes < 1) throw ValidationError("num_classes must be >= 1");
  const std::size_t d = X.front().dimension;
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].dimension != d) {
      throw ValidationError("dimension mismatch: row " + std::to_string(i) + " has dimension " +
                            std::to_string(X[i].dimension) + ", expected " + std::to_string(d));
    }
    if (y[i] < 0 || y[i] >= num_classes) {
      throw ValidationError("class id " + std::to_string(y[i]) + " outside [0," +
                            std::to_string(num_classes) + ")");
    }
  }
  return d;
}

inline void check_dimension(const SparseVector& x, std::size_t expected) {
  if (x.dimension != expected) {
    throw ValidationError("dimension mismatch: input has dimension " + std::to_string(x.dimension) +
                          ", model expects " + std::to_string(expected));
  }
}

/// First index of the maximum; lowest class index wins ties.
inline int argmax(std::span<const double> scores) {
  int best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k) {
    if (scores[k] > scores[best]) best = static_cast<int>(k);
  }
  return best;
}

}  // namespace uttlab
