#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "uttlab/adaboost.hpp"
#include "uttlab/exec.hpp"
#include "uttlab/linear_models.hpp"
#include "uttlab/naive_bayes.hpp"
#include "uttlab/random_forest.hpp"

namespace uttlab {

enum class LearnerKind { naive_bayes, adaboost_nb, random_forest, sgd_svm, logreg };

/// Short ids used in configs, file names and reports: nb, adaboost_nb, rf, gd_svm, logreg.
std::string_view to_string(LearnerKind kind);
LearnerKind parse_learner(std::string_view id);
/// Random forest and hinge SGD consume a seed; the others are deterministic.
bool is_seed_sensitive(LearnerKind kind);

/// Learner kind plus the hyperparameters of every kind (only the matching block is used).
struct LearnerSpec {
  LearnerKind kind = LearnerKind::naive_bayes;
  NaiveBayesParams nb;
  AdaBoostParams adaboost;
  ForestParams forest;
  SgdParams sgd;
  LogRegParams logreg;
};

/// Hyperparameters of spec.kind only, e.g. {"n_trees": 100, ...} for rf.
nlohmann::json spec_to_json(const LearnerSpec& spec);
/// Overwrites the named hyperparameters of spec.kind; unknown keys or wrong
/// types throw ConfigError.
void apply_hyperparameters(LearnerSpec& spec, const nlohmann::json& overrides);

using Model = std::variant<NaiveBayesModel, AdaBoostModel, ForestModel, LinearModel>;

Model train_model(const LearnerSpec& spec, std::span<const SparseVector> X, std::span<const int> y,
                  int num_classes, std::uint64_t seed, Exec exec = Exec::parallel);

int num_classes(const Model& model);
std::size_t input_dimension(const Model& model);
LearnerKind kind_of(const Model& model);

/// Native per-class scores: log-joint (NB), weighted votes (boosting), vote
/// counts (forest), margins or logits (linear).
void decision_scores(const Model& model, const SparseVector& x, std::span<double> scores);
int predict_one(const Model& model, const SparseVector& x);

struct Predictions {
  std::vector<int> labels;
  std::vector<std::vector<double>> scores;
};

/// labels[i] == argmax(scores[i]) with ties to the lowest class index.
Predictions predict(const Model& model, std::span<const SparseVector> X, Exec exec = Exec::parallel);

/// Self-describing JSON container: {"format", "kind", "hyperparameters",
/// "classes", "parameters"}. Doubles round-trip exactly; -inf is stored as null.
nlohmann::json model_to_json(const Model& model, const std::vector<std::string>& class_names);

struct LoadedModel {
  Model model;
  std::vector<std::string> class_names;
};

LoadedModel model_from_json(const nlohmann::json& doc);

void save_model(const std::filesystem::path& path, const Model& model,
                const std::vector<std::string>& class_names);
LoadedModel load_model(const std::filesystem::path& path);

}  // namespace uttlab
