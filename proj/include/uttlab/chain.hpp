#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "uttlab/error.hpp"
#include "uttlab/exec.hpp"
#include "uttlab/label_matrix.hpp"
#include "uttlab/model.hpp"
#include "uttlab/text_features.hpp"

namespace uttlab {

/// x extended by one column per earlier chain label: column d + j holds 1.0
/// when indicator j is set. Dimension becomes d + indicators.size().
SparseVector augment(const SparseVector& x, std::span<const std::uint8_t> indicators);

/// Most frequent label first, ties lexicographic (by universe position, which
/// is sorted). Returns column indices.
std::vector<int> default_chain_order(const LabelMatrix& Y);

/// Throws ValidationError unless order is a permutation of 0..L-1.
void check_permutation(std::span<const int> order, std::size_t n_labels);

/// Order given as label names, resolved against Y's universe.
std::vector<int> resolve_order(const LabelMatrix& Y, std::span<const std::string> order);

/// Training design of link j: X augmented with the true indicators of
/// order[0..j-1], plus its binary target column order[j].
struct LinkDesign {
  std::vector<SparseVector> X;
  std::vector<int> y;
};
LinkDesign build_link_design(std::span<const SparseVector> X, const LabelMatrix& Y,
                             std::span<const int> order, std::size_t j);

/// Chain over any link type. Links are trained independently (teacher forcing
/// makes them so) and evaluated sequentially per item at prediction time.
template <class Link>
struct BasicChain {
  std::vector<std::string> label_universe;
  std::vector<int> order;
  std::vector<Link> links;
  std::size_t base_dimension = 0;
};

/// train(design, j) -> Link
template <class Link, class Trainer>
BasicChain<Link> fit_chain_with(Trainer&& train, std::span<const SparseVector> X, const LabelMatrix& Y,
                                std::span<const int> order, Exec exec = Exec::parallel) {
  if (X.size() != Y.rows) {
    throw ValidationError("dimension mismatch: " + std::to_string(X.size()) + " feature rows vs " +
                          std::to_string(Y.rows) + " label rows");
  }
  if (X.empty()) throw ValidationError("empty training set");
  check_permutation(order, Y.cols);
  BasicChain<Link> chain;
  chain.label_universe = Y.label_universe;
  chain.order.assign(order.begin(), order.end());
  chain.base_dimension = X.front().dimension;
  chain.links.resize(order.size());

  const auto L = static_cast<std::ptrdiff_t>(order.size());
  std::exception_ptr failure;
  auto body = [&](std::ptrdiff_t j) {
    try {
      LinkDesign design = build_link_design(X, Y, order, static_cast<std::size_t>(j));
      chain.links[j] = train(design, static_cast<std::size_t>(j));
    } catch (...) {
#pragma omp critical(uttlab_chain_error)
      if (!failure) failure = std::current_exception();
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < L; ++j) body(j);
  } else {
    for (std::ptrdiff_t j = 0; j < L; ++j) body(j);
  }
  if (failure) std::rethrow_exception(failure);
  return chain;
}

/// decide(link, augmented x) -> bool
template <class Link, class Decide>
LabelMatrix predict_chain_with(const BasicChain<Link>& chain, Decide&& decide,
                               std::span<const SparseVector> X, Exec exec = Exec::parallel) {
  LabelMatrix out(X.size(), chain.label_universe);
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].dimension != chain.base_dimension) {
      throw ValidationError("dimension mismatch: input has dimension " +
                            std::to_string(X[i].dimension) + ", chain expects " +
                            std::to_string(chain.base_dimension));
    }
  }
  const auto n = static_cast<std::ptrdiff_t>(X.size());
  auto body = [&](std::ptrdiff_t i) {
    std::vector<std::uint8_t> seen;
    seen.reserve(chain.order.size());
    for (std::size_t j = 0; j < chain.order.size(); ++j) {
      const bool on = decide(chain.links[j], augment(X[i], seen));
      seen.push_back(on ? 1 : 0);
      out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(chain.order[j])) = on ? 1 : 0;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chains of library learners

struct ChainModel {
  LearnerSpec spec;
  BasicChain<Model> chain;
};

/// Link j is a two-class model (0 = absent, 1 = present) seeded with
/// derive_seed(seed, j).
ChainModel fit_chain(const LearnerSpec& spec, std::span<const SparseVector> X, const LabelMatrix& Y,
                     std::span<const int> order, std::uint64_t seed, Exec exec = Exec::parallel);

/// A link fires when its model's native decision picks class 1.
LabelMatrix predict_chain(const ChainModel& chain, std::span<const SparseVector> X,
                          Exec exec = Exec::parallel);

nlohmann::json chain_to_json(const ChainModel& chain);
ChainModel chain_from_json(const nlohmann::json& doc);

}  // namespace uttlab
