#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "uttlab/exec.hpp"

namespace uttlab {

/// One speaker turn. fine_labels is non-empty and duplicate-free; its order is
/// the order found in the source file.
struct Utterance {
  std::string session_id;
  std::size_t turn_index = 0;
  std::string speaker;
  std::string text;
  std::vector<std::string> fine_labels;

  bool operator==(const Utterance&) const = default;
};

struct Session {
  std::string id;
  std::vector<Utterance> utterances;  // turn_index == position

  bool operator==(const Session&) const = default;
};

struct Corpus {
  std::vector<Session> sessions;  // first-appearance order
  std::set<std::string> label_inventory;

  std::size_t utterance_count() const;
  bool operator==(const Corpus&) const = default;
};

/// Reads the JSON Lines transcript format:
///   {"session": str, "turn": int, "speaker": str, "text": str, "labels": [str, ...]}
/// Records of a session may appear in any order; turns must be 0..n-1 without
/// gaps or duplicates. Throws ParseError naming the line on any violation.
Corpus parse_transcripts(const std::filesystem::path& path);
Corpus parse_transcripts(std::istream& in, const std::string& source_name = "<stream>");

void write_transcripts(const Corpus& corpus, std::ostream& out);
void write_transcripts(const Corpus& corpus, const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Taxonomy

enum class Top { emo, cog };

std::string_view to_string(Top top);

struct TaxonomyEntry {
  Top top = Top::cog;
  std::string coarse;

  bool operator==(const TaxonomyEntry&) const = default;
};

/// fine label -> (top category, coarse class). Construction validates that no
/// coarse class sits under both tops.
class Taxonomy {
 public:
  Taxonomy() = default;
  explicit Taxonomy(std::map<std::string, TaxonomyEntry> entries);

  /// JSON object: fine_label -> {"top": "EMO"|"COG", "coarse": str}
  static Taxonomy load(const std::filesystem::path& path);
  static Taxonomy parse(std::string_view json_text, const std::string& source_name = "<taxonomy>");

  const TaxonomyEntry* find(const std::string& fine_label) const;
  const std::map<std::string, TaxonomyEntry>& entries() const { return entries_; }
  std::string to_json() const;

 private:
  std::map<std::string, TaxonomyEntry> entries_;
};

// ---------------------------------------------------------------------------
// Tasks

enum class TaskId { emo_cog, emo8, cog8, emo_full, cog_full };

inline constexpr TaskId kAllTasks[] = {TaskId::emo_cog, TaskId::emo8, TaskId::cog8,
                                       TaskId::emo_full, TaskId::cog_full};

std::string_view to_string(TaskId task);
/// Accepts "EMO-COG", "EMO-8", "COG-8", "EMO-FULL", "COG-FULL".
TaskId parse_task(std::string_view name);
inline bool is_multilabel(TaskId task) { return task != TaskId::emo_cog; }

inline constexpr std::string_view kEmotionLabel = "EMOTION";
inline constexpr std::string_view kNonEmotionLabel = "NON-EMOTION";

struct TaskItem {
  std::string item_id;  // session_id + ":" + turn_index
  std::string context_text;
  std::vector<std::string> labels;  // sorted, unique

  bool operator==(const TaskItem&) const = default;
};

struct TaskDataset {
  TaskId task = TaskId::emo_cog;
  std::vector<std::string> label_universe;  // sorted; defines class indices
  std::vector<TaskItem> items;
  bool multilabel = false;

  /// Index of a label in label_universe, or -1.
  int label_index(const std::string& label) const;
};

struct ContextOptions {
  std::size_t depth = 2;
  std::string placeholder = "[PAD]";
  std::string separator = "[SEP]";
};

std::string make_item_id(const std::string& session_id, std::size_t turn_index);

/// Text of utterances i-depth .. i joined by " <sep> ", with the placeholder for
/// every predecessor before the session start.
std::string build_context_window(std::span<const Utterance> session, std::size_t i,
                                 const ContextOptions& options = {});

TaskDataset derive_task(const Corpus& corpus, const Taxonomy& taxonomy, TaskId task,
                        const ContextOptions& options = {}, Exec exec = Exec::parallel);

// ---------------------------------------------------------------------------
// Splitting

struct SplitPair {
  TaskDataset train;
  TaskDataset test;
  std::uint64_t seed = 0;
  double ratio = 0.9;  // train fraction
};

/// Iterative stratification: items are placed rarest-label-first into the fold
/// with the largest remaining demand for that label. Deterministic in
/// (dataset, ratio, seed). Items of both folds keep their original order.
SplitPair stratified_split(const TaskDataset& dataset, double ratio, std::uint64_t seed);

/// Writes one item_id per line after a "# seed=<s> ratio=<r> fold=<train|test>" header.
void write_split_manifest(const SplitPair& split, const std::filesystem::path& train_path,
                          const std::filesystem::path& test_path);

struct SplitManifest {
  std::uint64_t seed = 0;
  double ratio = 0.0;
  std::vector<std::string> item_ids;
};

SplitManifest read_split_manifest(const std::filesystem::path& path);

}  // namespace uttlab
