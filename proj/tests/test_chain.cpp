#include <doctest.h>

#include "support.hpp"
#include "uttlab/chain.hpp"

using namespace uttlab;
using testing::dense;

namespace {

LabelMatrix matrix(const std::vector<std::vector<int>>& rows, std::vector<std::string> universe) {
  LabelMatrix m(rows.size(), std::move(universe));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) m.at(i, j) = static_cast<std::uint8_t>(rows[i][j]);
  }
  return m;
}

// Multilabel data where label j tends to follow from feature j and label 2
// copies label 0.
struct ChainData {
  std::vector<SparseVector> X;
  LabelMatrix Y;
};

ChainData chain_data(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  ChainData d;
  d.Y = LabelMatrix(n, {"a", "b", "c"});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x(6);
    for (auto& v : x) v = rng.uniform() < 0.2 ? rng.uniform() : 0.0;
    const bool a = rng.uniform() < 0.5, b = rng.uniform() < 0.3;
    if (a) x[0] += 1.0;
    if (b) x[1] += 1.0;
    d.Y.at(i, 0) = a;
    d.Y.at(i, 1) = b;
    d.Y.at(i, 2) = a;
    d.X.push_back(dense(x));
  }
  return d;
}

}  // namespace

TEST_CASE("augment appends indicator columns") {
  const SparseVector x = make_sparse(3, {{0, 0.5}, {2, 1.0}});
  const std::vector<std::uint8_t> ind{1, 0, 1};
  const SparseVector a = augment(x, ind);
  CHECK(a.dimension == 6);
  CHECK(a.indices == std::vector<std::uint32_t>{0, 2, 3, 5});
  CHECK(a.get(3) == 1.0);
  CHECK(a.get(4) == 0.0);
  CHECK(augment(x, {}) == x);
}

TEST_CASE("default order: descending frequency, ties by universe position") {
  const LabelMatrix Y = matrix({{1, 1, 0, 1}, {0, 1, 0, 1}, {0, 1, 1, 0}}, {"a", "b", "c", "d"});
  CHECK(default_chain_order(Y) == std::vector<int>{1, 3, 0, 2});
  const std::vector<std::string> names{"c", "a", "d", "b"};
  CHECK(resolve_order(Y, names) == std::vector<int>{2, 0, 3, 1});
  const std::vector<std::string> bad{"c", "a", "zz", "b"};
  CHECK_THROWS_AS(resolve_order(Y, bad), ValidationError);
  CHECK_THROWS_AS(check_permutation(std::vector<int>{0, 0, 1, 2}, 4), ValidationError);
  CHECK_THROWS_AS(check_permutation(std::vector<int>{0, 1}, 4), ValidationError);
}

TEST_CASE("link designs use the true earlier labels") {
  const std::vector<SparseVector> X{dense({1}), dense({2})};
  const LabelMatrix Y = matrix({{1, 0, 1}, {0, 1, 1}}, {"a", "b", "c"});
  const std::vector<int> order{2, 0, 1};
  const LinkDesign d0 = build_link_design(X, Y, order, 0);
  CHECK(d0.X[0].dimension == 1);
  CHECK(d0.y == std::vector<int>{1, 1});
  const LinkDesign d2 = build_link_design(X, Y, order, 2);
  CHECK(d2.X[0].dimension == 3);
  CHECK(d2.X[0].get(1) == 1.0);  // c
  CHECK(d2.X[0].get(2) == 1.0);  // a
  CHECK(d2.X[1].get(2) == 0.0);
  CHECK(d2.y == std::vector<int>{0, 1});
}

TEST_CASE("prediction feeds predicted, not true, indicators forward") {
  // link 0 fires on feature 0; link 1 copies link 0's output.
  struct Rule {
    int j = 0;
  };
  const std::vector<SparseVector> X{dense({0.9}), dense({0.1})};
  const LabelMatrix Y = matrix({{1, 0}, {0, 1}}, {"p", "q"});
  const std::vector<int> order{0, 1};
  const auto chain = fit_chain_with<Rule>([](const LinkDesign&, std::size_t j) { return Rule{static_cast<int>(j)}; },
                                          X, Y, order, Exec::serial);
  auto decide = [](const Rule& r, const SparseVector& x) {
    if (r.j == 0) return x.get(0) > 0.5;
    CHECK(x.dimension == 2);
    return x.get(1) == 1.0;
  };
  const LabelMatrix P = predict_chain_with(chain, decide, X, Exec::serial);
  CHECK(P == matrix({{1, 1}, {0, 0}}, {"p", "q"}));
  CHECK(P.row_empty(1));
}

TEST_CASE("trainer errors propagate out of the parallel loop") {
  const std::vector<SparseVector> X{dense({1}), dense({2})};
  const LabelMatrix Y = matrix({{1, 0}, {0, 1}}, {"p", "q"});
  const std::vector<int> order{0, 1};
  auto boom = [](const LinkDesign&, std::size_t j) -> int {
    if (j == 1) throw TrainingError("link failed");
    return 0;
  };
  CHECK_THROWS_AS(fit_chain_with<int>(boom, X, Y, order, Exec::parallel), TrainingError);
  const std::vector<SparseVector> one{dense({1})};
  CHECK_THROWS_AS(fit_chain_with<int>(boom, one, Y, order), ValidationError);
}

TEST_CASE("learner chains recover a copied label and agree across exec modes") {
  const ChainData train = chain_data(1, 400), test = chain_data(2, 200);
  const std::vector<int> order = default_chain_order(train.Y);
  for (LearnerKind k : {LearnerKind::naive_bayes, LearnerKind::logreg, LearnerKind::sgd_svm,
                        LearnerKind::random_forest, LearnerKind::adaboost_nb}) {
    LearnerSpec spec;
    spec.kind = k;
    spec.forest.n_trees = 10;
    spec.adaboost.n_estimators = 5;
    spec.sgd.epochs = 30;
    const ChainModel a = fit_chain(spec, train.X, train.Y, order, 3, Exec::serial);
    const ChainModel b = fit_chain(spec, train.X, train.Y, order, 3, Exec::parallel);
    const LabelMatrix pa = predict_chain(a, test.X, Exec::serial);
    const LabelMatrix pb = predict_chain(b, test.X, Exec::parallel);
    CHECK_MESSAGE(pa == pb, to_string(k));
    CHECK(pa.label_universe == train.Y.label_universe);
    for (std::size_t i = 0; i < pa.rows; ++i) {
      for (std::size_t j = 0; j < pa.cols; ++j) CHECK(pa.at(i, j) <= 1);
    }
  }
  // With label "a" first in the order, the chain's "c" link sees a's indicator.
  LearnerSpec lr;
  lr.kind = LearnerKind::logreg;
  const std::vector<int> a_first{0, 1, 2};
  const LabelMatrix p = predict_chain(fit_chain(lr, train.X, train.Y, a_first, 0), test.X);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < p.rows; ++i) agree += p.at(i, 0) == p.at(i, 2);
  CHECK(agree == p.rows);
}

TEST_CASE("chain json round trip") {
  const ChainData train = chain_data(5, 150), test = chain_data(6, 60);
  LearnerSpec spec;
  spec.kind = LearnerKind::random_forest;
  spec.forest.n_trees = 5;
  const std::vector<int> order{2, 0, 1};
  const ChainModel c = fit_chain(spec, train.X, train.Y, order, 8);
  const nlohmann::json doc = chain_to_json(c);
  CHECK(doc["format"] == "uttlab-chain/1");
  CHECK(doc["order"] == nlohmann::json({"c", "a", "b"}));
  const ChainModel back = chain_from_json(nlohmann::json::parse(doc.dump()));
  CHECK(back.chain.order == c.chain.order);
  CHECK(predict_chain(back, test.X) == predict_chain(c, test.X));
  nlohmann::json broken = doc;
  broken["order"] = {"c", "a", "zz"};
  CHECK_THROWS(chain_from_json(broken));
}

TEST_CASE("chain prediction checks input dimension") {
  const ChainData train = chain_data(7, 50);
  LearnerSpec spec;
  const ChainModel c = fit_chain(spec, train.X, train.Y, default_chain_order(train.Y), 0);
  const std::vector<SparseVector> wrong{dense({1, 2})};
  CHECK_THROWS_AS(predict_chain(c, wrong), ValidationError);
}
