#include "uttlab/model.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "uttlab/error.hpp"

namespace uttlab {

using json = nlohmann::json;

namespace {
constexpr const char* kFormat = "uttlab-model/1";

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json doubles_to_json(const std::vector<double>& v) {
  json arr = json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      arr.push_back(x);
    } else {
      arr.push_back(nullptr);  // only -inf occurs (unobserved class priors)
    }
  }
  return arr;
}

std::vector<double> doubles_from_json(const json& arr) {
  std::vector<double> v;
  v.reserve(arr.size());
  for (const auto& x : arr) {
    v.push_back(x.is_null() ? -std::numeric_limits<double>::infinity() : x.get<double>());
  }
  return v;
}

json nb_to_json(const NaiveBayesModel& m) {
  return {{"num_classes", m.num_classes},
          {"dimension", m.dimension},
          {"alpha", m.alpha},
          {"log_prior", doubles_to_json(m.log_prior)},
          {"log_likelihood", doubles_to_json(m.log_likelihood)}};
}

NaiveBayesModel nb_from_json(const json& j) {
  NaiveBayesModel m;
  m.num_classes = j.at("num_classes").get<int>();
  m.dimension = j.at("dimension").get<std::size_t>();
  m.alpha = j.at("alpha").get<double>();
  m.log_prior = doubles_from_json(j.at("log_prior"));
  m.log_likelihood = doubles_from_json(j.at("log_likelihood"));
  return m;
}

json tree_to_json(const DecisionTree& t) {
  std::vector<std::int32_t> feature, left, right, leaf;
  std::vector<double> threshold;
  for (const auto& n : t.nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    leaf.push_back(n.leaf);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left},
          {"right", right},     {"leaf", leaf},           {"leaf_counts", t.leaf_counts}};
}

DecisionTree tree_from_json(const json& j, int num_classes) {
  DecisionTree t;
  t.num_classes = num_classes;
  auto feature = j.at("feature").get<std::vector<std::int32_t>>();
  auto threshold = j.at("threshold").get<std::vector<double>>();
  auto left = j.at("left").get<std::vector<std::int32_t>>();
  auto right = j.at("right").get<std::vector<std::int32_t>>();
  auto leaf = j.at("leaf").get<std::vector<std::int32_t>>();
  t.nodes.resize(feature.size());
  for (std::size_t i = 0; i < feature.size(); ++i) {
    t.nodes[i] = {feature[i], threshold[i], left[i], right[i], leaf[i]};
  }
  t.leaf_counts = j.at("leaf_counts").get<std::vector<double>>();
  return t;
}

}  // namespace

std::string_view to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::naive_bayes: return "nb";
    case LearnerKind::adaboost_nb: return "adaboost_nb";
    case LearnerKind::random_forest: return "rf";
    case LearnerKind::sgd_svm: return "gd_svm";
    case LearnerKind::logreg: return "logreg";
  }
  return "?";
}

LearnerKind parse_learner(std::string_view id) {
  for (auto k : {LearnerKind::naive_bayes, LearnerKind::adaboost_nb, LearnerKind::random_forest,
                 LearnerKind::sgd_svm, LearnerKind::logreg}) {
    if (to_string(k) == id) return k;
  }
  throw ConfigError("unknown model id \"" + std::string(id) + "\"");
}

bool is_seed_sensitive(LearnerKind kind) {
  return kind == LearnerKind::random_forest || kind == LearnerKind::sgd_svm;
}

json spec_to_json(const LearnerSpec& spec) {
  switch (spec.kind) {
    case LearnerKind::naive_bayes: return {{"alpha", spec.nb.alpha}};
    case LearnerKind::adaboost_nb:
      return {{"n_estimators", spec.adaboost.n_estimators},
              {"learning_rate", spec.adaboost.learning_rate},
              {"nb_alpha", spec.adaboost.nb_alpha}};
    case LearnerKind::random_forest:
      return {{"n_trees", spec.forest.n_trees},
              {"max_features", spec.forest.max_features},
              {"min_samples_split", spec.forest.min_samples_split},
              {"bootstrap", spec.forest.bootstrap}};
    case LearnerKind::sgd_svm:
      return {{"epochs", spec.sgd.epochs},
              {"lambda", spec.sgd.lambda},
              {"tol", spec.sgd.tol},
              {"n_iter_no_change", spec.sgd.n_iter_no_change},
              {"intercept_decay", spec.sgd.intercept_decay}};
    case LearnerKind::logreg:
      return {{"lambda", spec.logreg.lambda},
              {"max_iter", spec.logreg.max_iter},
              {"tol", spec.logreg.tol}};
  }
  return json::object();
}

namespace {

template <class T>
void take(const json& overrides, const char* key, T& field, std::string_view model) {
  auto it = overrides.find(key);
  if (it == overrides.end()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError("hyperparameter " + std::string(model) + "." + key + " has the wrong type");
  }
}

}  // namespace

void apply_hyperparameters(LearnerSpec& spec, const json& overrides) {
  const std::string_view id = to_string(spec.kind);
  if (!overrides.is_object()) {
    throw ConfigError("hyperparameters for " + std::string(id) + " must be an object");
  }
  const json known = spec_to_json(spec);
  for (const auto& [key, value] : overrides.items()) {
    if (!known.contains(key)) {
      throw ConfigError("unknown hyperparameter " + std::string(id) + "." + key);
    }
  }
  switch (spec.kind) {
    case LearnerKind::naive_bayes:
      take(overrides, "alpha", spec.nb.alpha, id);
      if (!(spec.nb.alpha > 0.0)) throw ConfigError("nb.alpha must be > 0");
      break;
    case LearnerKind::adaboost_nb:
      take(overrides, "n_estimators", spec.adaboost.n_estimators, id);
      take(overrides, "learning_rate", spec.adaboost.learning_rate, id);
      take(overrides, "nb_alpha", spec.adaboost.nb_alpha, id);
      if (spec.adaboost.n_estimators < 1) throw ConfigError("adaboost_nb.n_estimators must be >= 1");
      break;
    case LearnerKind::random_forest:
      take(overrides, "n_trees", spec.forest.n_trees, id);
      take(overrides, "max_features", spec.forest.max_features, id);
      take(overrides, "min_samples_split", spec.forest.min_samples_split, id);
      take(overrides, "bootstrap", spec.forest.bootstrap, id);
      if (spec.forest.n_trees < 1) throw ConfigError("rf.n_trees must be >= 1");
      break;
    case LearnerKind::sgd_svm:
      take(overrides, "epochs", spec.sgd.epochs, id);
      take(overrides, "lambda", spec.sgd.lambda, id);
      take(overrides, "tol", spec.sgd.tol, id);
      take(overrides, "n_iter_no_change", spec.sgd.n_iter_no_change, id);
      take(overrides, "intercept_decay", spec.sgd.intercept_decay, id);
      if (spec.sgd.epochs < 1) throw ConfigError("gd_svm.epochs must be >= 1");
      if (!(spec.sgd.lambda > 0.0)) throw ConfigError("gd_svm.lambda must be > 0");
      break;
    case LearnerKind::logreg:
      take(overrides, "lambda", spec.logreg.lambda, id);
      take(overrides, "max_iter", spec.logreg.max_iter, id);
      take(overrides, "tol", spec.logreg.tol, id);
      if (spec.logreg.max_iter < 0) throw ConfigError("logreg.max_iter must be >= 0");
      break;
  }
}

Model train_model(const LearnerSpec& spec, std::span<const SparseVector> X, std::span<const int> y,
                  int num_classes, std::uint64_t seed, Exec exec) {
  switch (spec.kind) {
    case LearnerKind::naive_bayes: return train_naive_bayes(X, y, num_classes, spec.nb);
    case LearnerKind::adaboost_nb: return train_adaboost_nb(X, y, num_classes, spec.adaboost);
    case LearnerKind::random_forest:
      return train_random_forest(X, y, num_classes, spec.forest, seed, exec);
    case LearnerKind::sgd_svm: return train_sgd_svm(X, y, num_classes, spec.sgd, seed);
    case LearnerKind::logreg: return train_logreg(X, y, num_classes, spec.logreg);
  }
  throw ConfigError("unhandled learner kind");
}

int num_classes(const Model& model) {
  return std::visit([](const auto& m) { return m.num_classes; }, model);
}

std::size_t input_dimension(const Model& model) {
  return std::visit([](const auto& m) { return m.dimension; }, model);
}

LearnerKind kind_of(const Model& model) {
  return std::visit(overloaded{
                        [](const NaiveBayesModel&) { return LearnerKind::naive_bayes; },
                        [](const AdaBoostModel&) { return LearnerKind::adaboost_nb; },
                        [](const ForestModel&) { return LearnerKind::random_forest; },
                        [](const LinearModel& m) {
                          return m.kind == LinearKind::logistic ? LearnerKind::logreg
                                                                : LearnerKind::sgd_svm;
                        },
                    },
                    model);
}

void decision_scores(const Model& model, const SparseVector& x, std::span<double> scores) {
  std::visit([&](const auto& m) { m.decision(x, scores); }, model);
}

int predict_one(const Model& model, const SparseVector& x) {
  return std::visit([&](const auto& m) { return m.predict_one(x); }, model);
}

Predictions predict(const Model& model, std::span<const SparseVector> X, Exec exec) {
  const std::size_t n = X.size();
  const std::size_t dim = input_dimension(model);
  for (const auto& x : X) check_dimension(x, dim);
  Predictions out;
  out.labels.resize(n);
  out.scores.assign(n, std::vector<double>(num_classes(model)));
  auto body = [&](std::size_t i) {
    decision_scores(model, X[i], out.scores[i]);
    out.labels[i] = argmax(out.scores[i]);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) body(i);
  } else {
    for (std::size_t i = 0; i < n; ++i) body(i);
  }
  return out;
}

json model_to_json(const Model& model, const std::vector<std::string>& class_names) {
  json doc;
  doc["format"] = kFormat;
  doc["kind"] = std::string(to_string(kind_of(model)));
  doc["classes"] = class_names;
  std::visit(overloaded{
                 [&](const NaiveBayesModel& m) {
                   doc["hyperparameters"] = {{"alpha", m.alpha}};
                   doc["parameters"] = nb_to_json(m);
                 },
                 [&](const AdaBoostModel& m) {
                   doc["hyperparameters"] = {{"n_estimators", m.max_estimators},
                                             {"learning_rate", m.learning_rate}};
                   json est = json::array();
                   for (const auto& e : m.estimators) est.push_back(nb_to_json(e));
                   doc["parameters"] = {{"num_classes", m.num_classes},
                                        {"dimension", m.dimension},
                                        {"alphas", m.alphas},
                                        {"estimators", est}};
                 },
                 [&](const ForestModel& m) {
                   doc["hyperparameters"] = {{"n_trees", m.params.n_trees},
                                             {"max_features", m.params.max_features},
                                             {"min_samples_split", m.params.min_samples_split},
                                             {"bootstrap", m.params.bootstrap},
                                             {"seed", m.seed}};
                   json trees = json::array();
                   for (const auto& t : m.trees) trees.push_back(tree_to_json(t));
                   doc["parameters"] = {{"num_classes", m.num_classes},
                                        {"dimension", m.dimension},
                                        {"features_per_split", m.features_per_split},
                                        {"trees", trees}};
                 },
                 [&](const LinearModel& m) {
                   doc["hyperparameters"] = {{"lambda", m.lambda}};
                   doc["parameters"] = {{"num_classes", m.num_classes},
                                        {"dimension", m.dimension},
                                        {"n_outputs", m.n_outputs},
                                        {"weights", m.weights},
                                        {"bias", m.bias},
                                        {"iterations", m.iterations},
                                        {"converged", m.converged},
                                        {"gradient_norm", m.gradient_norm}};
                 },
             },
             model);
  return doc;
}

LoadedModel model_from_json(const json& doc) {
  try {
    if (doc.at("format") != kFormat) {
      throw ParseError("unsupported model format " + doc.at("format").dump());
    }
    const LearnerKind kind = parse_learner(doc.at("kind").get<std::string>());
    const json& p = doc.at("parameters");
    const json& h = doc.at("hyperparameters");
    LoadedModel out{NaiveBayesModel{}, doc.at("classes").get<std::vector<std::string>>()};
    switch (kind) {
      case LearnerKind::naive_bayes:
        out.model = nb_from_json(p);
        break;
      case LearnerKind::adaboost_nb: {
        AdaBoostModel m;
        m.num_classes = p.at("num_classes").get<int>();
        m.dimension = p.at("dimension").get<std::size_t>();
        m.alphas = p.at("alphas").get<std::vector<double>>();
        m.learning_rate = h.at("learning_rate").get<double>();
        m.max_estimators = h.at("n_estimators").get<int>();
        for (const auto& e : p.at("estimators")) m.estimators.push_back(nb_from_json(e));
        out.model = std::move(m);
        break;
      }
      case LearnerKind::random_forest: {
        ForestModel m;
        m.num_classes = p.at("num_classes").get<int>();
        m.dimension = p.at("dimension").get<std::size_t>();
        m.features_per_split = p.at("features_per_split").get<int>();
        m.seed = h.at("seed").get<std::uint64_t>();
        m.params.n_trees = h.at("n_trees").get<int>();
        m.params.max_features = h.at("max_features").get<int>();
        m.params.min_samples_split = h.at("min_samples_split").get<int>();
        m.params.bootstrap = h.at("bootstrap").get<bool>();
        for (const auto& t : p.at("trees")) m.trees.push_back(tree_from_json(t, m.num_classes));
        out.model = std::move(m);
        break;
      }
      case LearnerKind::sgd_svm:
      case LearnerKind::logreg: {
        LinearModel m;
        m.kind = kind == LearnerKind::logreg ? LinearKind::logistic : LinearKind::hinge_sgd;
        m.num_classes = p.at("num_classes").get<int>();
        m.dimension = p.at("dimension").get<std::size_t>();
        m.n_outputs = p.at("n_outputs").get<int>();
        m.weights = p.at("weights").get<std::vector<double>>();
        m.bias = p.at("bias").get<std::vector<double>>();
        m.lambda = h.at("lambda").get<double>();
        m.iterations = p.at("iterations").get<int>();
        m.converged = p.at("converged").get<bool>();
        m.gradient_norm = p.at("gradient_norm").get<double>();
        out.model = std::move(m);
        break;
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model container: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const Model& model,
                const std::vector<std::string>& class_names) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << model_to_json(model, class_names).dump() << '\n';
}

LoadedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace uttlab
