#include "uttlab/chain.hpp"

#include <algorithm>
#include <numeric>

#include "uttlab/rng.hpp"

namespace uttlab {

using json = nlohmann::json;

SparseVector augment(const SparseVector& x, std::span<const std::uint8_t> indicators) {
  SparseVector out;
  out.dimension = x.dimension + indicators.size();
  out.indices = x.indices;
  out.values = x.values;
  for (std::size_t j = 0; j < indicators.size(); ++j) {
    if (indicators[j]) {
      out.indices.push_back(static_cast<std::uint32_t>(x.dimension + j));
      out.values.push_back(1.0);
    }
  }
  return out;
}

std::vector<int> default_chain_order(const LabelMatrix& Y) {
  std::vector<std::size_t> freq(Y.cols);
  for (std::size_t j = 0; j < Y.cols; ++j) freq[j] = Y.column_sum(j);
  std::vector<int> order(Y.cols);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return Y.label_universe[a] < Y.label_universe[b];
  });
  return order;
}

void check_permutation(std::span<const int> order, std::size_t n_labels) {
  if (order.size() != n_labels) {
    throw ValidationError("chain order has " + std::to_string(order.size()) + " entries for " +
                          std::to_string(n_labels) + " labels; not a permutation");
  }
  std::vector<char> seen(n_labels, 0);
  for (int j : order) {
    if (j < 0 || static_cast<std::size_t>(j) >= n_labels || seen[j]) {
      throw ValidationError("chain order is not a permutation of the label universe");
    }
    seen[j] = 1;
  }
}

std::vector<int> resolve_order(const LabelMatrix& Y, std::span<const std::string> order) {
  std::vector<int> out;
  for (const auto& label : order) {
    auto it = std::find(Y.label_universe.begin(), Y.label_universe.end(), label);
    if (it == Y.label_universe.end()) {
      throw ValidationError("chain order names unknown label \"" + label + "\"");
    }
    out.push_back(static_cast<int>(it - Y.label_universe.begin()));
  }
  check_permutation(out, Y.cols);
  return out;
}

LinkDesign build_link_design(std::span<const SparseVector> X, const LabelMatrix& Y,
                             std::span<const int> order, std::size_t j) {
  LinkDesign design;
  design.X.reserve(X.size());
  design.y.reserve(X.size());
  std::vector<std::uint8_t> previous(j);
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t q = 0; q < j; ++q) previous[q] = Y.at(i, static_cast<std::size_t>(order[q]));
    design.X.push_back(augment(X[i], previous));
    design.y.push_back(Y.at(i, static_cast<std::size_t>(order[j])));
  }
  return design;
}

ChainModel fit_chain(const LearnerSpec& spec, std::span<const SparseVector> X, const LabelMatrix& Y,
                     std::span<const int> order, std::uint64_t seed, Exec exec) {
  ChainModel out;
  out.spec = spec;
  // Parallelism lives at the link level; each link's own kernels run serially.
  const Exec inner = Exec::serial;
  out.chain = fit_chain_with<Model>(
      [&](const LinkDesign& design, std::size_t j) {
        return train_model(spec, design.X, design.y, 2, derive_seed(seed, static_cast<std::uint64_t>(j)),
                           inner);
      },
      X, Y, order, exec);
  return out;
}

LabelMatrix predict_chain(const ChainModel& chain, std::span<const SparseVector> X, Exec exec) {
  return predict_chain_with(
      chain.chain, [](const Model& link, const SparseVector& x) { return predict_one(link, x) == 1; }, X,
      exec);
}

json chain_to_json(const ChainModel& chain) {
  json links = json::array();
  for (const auto& link : chain.chain.links) links.push_back(model_to_json(link, {"0", "1"}));
  std::vector<std::string> order;
  for (int j : chain.chain.order) order.push_back(chain.chain.label_universe[j]);
  return {{"format", "uttlab-chain/1"},
          {"kind", std::string(to_string(chain.spec.kind))},
          {"hyperparameters", spec_to_json(chain.spec)},
          {"labels", chain.chain.label_universe},
          {"order", order},
          {"base_dimension", chain.chain.base_dimension},
          {"links", links}};
}

ChainModel chain_from_json(const json& doc) {
  try {
    if (doc.at("format") != "uttlab-chain/1") {
      throw ParseError("unsupported chain format " + doc.at("format").dump());
    }
    ChainModel out;
    out.spec.kind = parse_learner(doc.at("kind").get<std::string>());
    apply_hyperparameters(out.spec, doc.at("hyperparameters"));
    out.chain.label_universe = doc.at("labels").get<std::vector<std::string>>();
    out.chain.base_dimension = doc.at("base_dimension").get<std::size_t>();
    LabelMatrix shape(0, out.chain.label_universe);
    out.chain.order = resolve_order(shape, doc.at("order").get<std::vector<std::string>>());
    for (const auto& link : doc.at("links")) out.chain.links.push_back(model_from_json(link).model);
    if (out.chain.links.size() != out.chain.order.size()) {
      throw ParseError("chain has " + std::to_string(out.chain.links.size()) + " links for " +
                       std::to_string(out.chain.order.size()) + " labels");
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed chain container: ") + e.what());
  }
}

}  // namespace uttlab
