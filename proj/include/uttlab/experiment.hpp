#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "uttlab/corpus.hpp"
#include "uttlab/metrics.hpp"
#include "uttlab/model.hpp"

namespace uttlab {

inline constexpr std::string_view kBaselineId = "baseline";

/// Model ids accepted in configs: baseline plus the learner ids.
bool is_known_model(std::string_view id);
/// Table display name: Baseline, NB, AdaBoost+NB, RF, GD-SVM, LR.
std::string_view display_name(std::string_view model_id);

struct ExperimentConfig {
  std::string corpus;    // as written in the file
  std::string taxonomy;
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::vector<TaskId> tasks{std::begin(kAllTasks), std::end(kAllTasks)};
  std::vector<std::string> models{"baseline", "nb", "adaboost_nb", "rf", "gd_svm", "logreg"};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  double split_ratio = 0.9;
  std::uint64_t split_seed = 42;
  std::size_t context_depth = 2;
  std::size_t max_vocab = 3034;
  WeightSource weight_source = WeightSource::evaluation;
  std::map<std::string, nlohmann::json> hyperparameters;  // model id -> overrides
  int threads = 0;  // 0 keeps the OpenMP default

  std::filesystem::path corpus_path() const;
  std::filesystem::path taxonomy_path() const;
  LearnerSpec learner(LearnerKind kind) const;

  /// Every field with defaults filled in; key order fixed.
  nlohmann::ordered_json canonical() const;
  /// 16 hex digits of a hash of canonical() minus the thread count.
  std::string digest() const;
};

/// Strict parse: unknown keys, unknown task/model ids, empty seed lists,
/// ratios outside (0,1) and bad hyperparameters all throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_config(const std::filesystem::path& path);

/// One (task, model, seed) unit. Deterministic models carry no seed.
struct Cell {
  TaskId task;
  std::string model;
  std::optional<std::uint64_t> seed;

  /// "<task>__<model>" or "<task>__<model>__seed<s>"; used for file names.
  std::string name() const;
};

/// Tasks in config order, models in config order, seeds in config order.
std::vector<Cell> plan_cells(const ExperimentConfig& config);

std::uint64_t split_seed_for(const ExperimentConfig& config, TaskId task);
std::uint64_t model_seed_for(const Cell& cell);

struct ReportTable {
  std::vector<MetricsRow> runs;
  std::vector<AggregateRow> rows;       // one per (task, model), plan order
  std::map<std::string, std::size_t> empty_rows;  // "<task>__<model>" -> all-zero prediction rows, summed over runs
  std::string config_digest;
  std::string version;
};

struct IngestSummary {
  std::size_t sessions = 0;
  std::size_t utterances = 0;
  std::size_t fine_labels = 0;
  std::size_t one_label = 0, two_labels = 0, three_plus = 0;
  std::map<std::string, std::size_t> task_items;
};

// Stages. Each reads what earlier stages left under `out` and writes its own
// files atomically; run_experiment chains them.
IngestSummary stage_ingest(const ExperimentConfig& config, const std::filesystem::path& out);
void stage_split(const ExperimentConfig& config, const std::filesystem::path& out);
void stage_train(const ExperimentConfig& config, const std::filesystem::path& out);
void stage_evaluate(const ExperimentConfig& config, const std::filesystem::path& out);
ReportTable stage_report(const ExperimentConfig& config, const std::filesystem::path& out);

ReportTable run_experiment(const ExperimentConfig& config, const std::filesystem::path& out);

/// Plain-text tables, one block per task.
std::string render_report(const ReportTable& table, const ExperimentConfig& config);
std::string runs_csv(const ReportTable& table);
std::string aggregate_csv(const ReportTable& table);

/// Writes content to path via a temporary sibling and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace uttlab
