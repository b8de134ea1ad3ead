#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uttlab/corpus.hpp"
#include "uttlab/label_matrix.hpp"
#include "uttlab/metrics.hpp"

namespace uttlab {

/// One line of a prediction (or gold) file: {"item_id": str, "labels": [str, ...]}.
struct PredictionRecord {
  std::string item_id;
  std::vector<std::string> labels;  // sorted, unique

  bool operator==(const PredictionRecord&) const = default;
};

void write_predictions(std::span<const PredictionRecord> records, std::ostream& out);
void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path);
/// Throws ParseError with the line number on malformed lines or repeated ids.
std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source_name);
std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path);

/// Prediction records from the rows of a matrix, paired with item ids.
std::vector<PredictionRecord> records_from_matrix(std::span<const std::string> item_ids,
                                                  const LabelMatrix& m);
std::vector<PredictionRecord> gold_records(const TaskDataset& dataset);

struct AlignedLabels {
  LabelMatrix truth;
  LabelMatrix pred;
};

/// Aligns predictions to gold by item_id (gold order). Errors list the missing
/// and extra ids, and name any label outside the universe. Single-label tasks
/// require exactly one label per record.
AlignedLabels align_predictions(std::span<const PredictionRecord> gold,
                                std::span<const PredictionRecord> pred,
                                const std::vector<std::string>& universe, bool multilabel);

/// Universe used when none is supplied: the fixed pair for EMO-COG, otherwise
/// the sorted union of gold labels.
std::vector<std::string> default_universe(TaskId task, std::span<const PredictionRecord> gold);

/// The single scoring path shared by internal evaluation and external files.
MetricsRow score_records(TaskId task, const std::string& model, std::optional<std::uint64_t> seed,
                         std::span<const PredictionRecord> gold, std::span<const PredictionRecord> pred,
                         const std::vector<std::string>& universe,
                         WeightSource source = WeightSource::evaluation,
                         std::span<const std::size_t> training_support = {});

MetricsRow score_external(const std::filesystem::path& pred_path, const std::filesystem::path& gold_path,
                          TaskId task, const std::string& model = "external",
                          const std::optional<std::vector<std::string>>& universe = std::nullopt,
                          WeightSource source = WeightSource::evaluation,
                          std::span<const std::size_t> training_support = {});

struct ClassReport {
  std::string label;
  std::size_t support = 0;
  std::size_t predicted = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool never_predicted = false;  // precision undefined, reported as 0
};

/// Per-class report sorted by ascending F1, then by label.
std::vector<ClassReport> error_analysis(const LabelMatrix& truth, const LabelMatrix& pred);

void write_error_csv(std::span<const ClassReport> reports, std::ostream& out);

/// One universe label per line.
void write_universe(const std::vector<std::string>& universe, const std::filesystem::path& path);
std::vector<std::string> read_universe(const std::filesystem::path& path);

}  // namespace uttlab
