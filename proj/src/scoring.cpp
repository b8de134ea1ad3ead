#include "uttlab/scoring.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "uttlab/error.hpp"

namespace uttlab {

using json = nlohmann::json;

void write_predictions(std::span<const PredictionRecord> records, std::ostream& out) {
  for (const auto& r : records) {
    nlohmann::ordered_json line;
    line["item_id"] = r.item_id;
    line["labels"] = r.labels;
    out << line.dump() << '\n';
  }
}

void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  write_predictions(records, out);
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<PredictionRecord> read_predictions(std::istream& in, const std::string& source_name) {
  std::vector<PredictionRecord> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw ParseError(source_name, lineno, "malformed JSON");
    }
    if (!j.is_object()) throw ParseError(source_name, lineno, "record is not an object");
    PredictionRecord r;
    auto id = j.find("item_id");
    if (id == j.end() || !id->is_string()) {
      throw ParseError(source_name, lineno, "missing field \"item_id\"");
    }
    r.item_id = id->get<std::string>();
    auto labels = j.find("labels");
    if (labels == j.end() || !labels->is_array()) {
      throw ParseError(source_name, lineno, "missing field \"labels\"");
    }
    for (const auto& l : *labels) {
      if (!l.is_string()) throw ParseError(source_name, lineno, "labels must be strings");
      r.labels.push_back(l.get<std::string>());
    }
    std::sort(r.labels.begin(), r.labels.end());
    r.labels.erase(std::unique(r.labels.begin(), r.labels.end()), r.labels.end());
    if (!ids.insert(r.item_id).second) {
      throw ParseError(source_name, lineno, "duplicate item_id \"" + r.item_id + "\"");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_predictions(in, path.string());
}

std::vector<PredictionRecord> records_from_matrix(std::span<const std::string> item_ids,
                                                  const LabelMatrix& m) {
  if (item_ids.size() != m.rows) {
    throw ValidationError("shape mismatch: " + std::to_string(item_ids.size()) + " ids for " +
                          std::to_string(m.rows) + " rows");
  }
  std::vector<PredictionRecord> out(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) {
    out[i].item_id = item_ids[i];
    out[i].labels = m.row_labels(i);  // universe order is sorted
  }
  return out;
}

std::vector<PredictionRecord> gold_records(const TaskDataset& dataset) {
  std::vector<PredictionRecord> out;
  out.reserve(dataset.items.size());
  for (const auto& item : dataset.items) out.push_back({item.item_id, item.labels});
  return out;
}

namespace {

std::string list_ids(const std::vector<std::string>& ids) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) {
    if (i) s += ", ";
    s += ids[i];
  }
  if (ids.size() > shown) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

}  // namespace

AlignedLabels align_predictions(std::span<const PredictionRecord> gold,
                                std::span<const PredictionRecord> pred,
                                const std::vector<std::string>& universe, bool multilabel) {
  std::map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < universe.size(); ++j) column[universe[j]] = j;

  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : pred) by_id[p.item_id] = &p;
  std::vector<std::string> missing, extra;
  std::set<std::string> gold_ids;
  for (const auto& g : gold) {
    gold_ids.insert(g.item_id);
    if (!by_id.count(g.item_id)) missing.push_back(g.item_id);
  }
  for (const auto& p : pred) {
    if (!gold_ids.count(p.item_id)) extra.push_back(p.item_id);
  }
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "item_id mismatch between predictions and gold";
    if (!missing.empty()) msg += "; missing from predictions: " + list_ids(missing);
    if (!extra.empty()) msg += "; not in gold: " + list_ids(extra);
    throw ValidationError(msg);
  }

  AlignedLabels out{LabelMatrix(gold.size(), universe), LabelMatrix(gold.size(), universe)};
  auto fill = [&](LabelMatrix& m, std::size_t i, const PredictionRecord& r, const char* which) {
    if (!multilabel && r.labels.size() != 1) {
      throw ValidationError(std::string(which) + " item " + r.item_id + " has " +
                            std::to_string(r.labels.size()) +
                            " labels; a single-label task needs exactly one");
    }
    for (const auto& l : r.labels) {
      auto it = column.find(l);
      if (it == column.end()) {
        throw ValidationError(std::string(which) + " item " + r.item_id + ": label \"" + l +
                              "\" is outside the task universe");
      }
      m.at(i, it->second) = 1;
    }
  };
  for (std::size_t i = 0; i < gold.size(); ++i) {
    fill(out.truth, i, gold[i], "gold");
    fill(out.pred, i, *by_id.at(gold[i].item_id), "prediction");
  }
  return out;
}

std::vector<std::string> default_universe(TaskId task, std::span<const PredictionRecord> gold) {
  if (task == TaskId::emo_cog) {
    std::vector<std::string> u{std::string(kEmotionLabel), std::string(kNonEmotionLabel)};
    std::sort(u.begin(), u.end());
    return u;
  }
  std::set<std::string> labels;
  for (const auto& g : gold) labels.insert(g.labels.begin(), g.labels.end());
  return {labels.begin(), labels.end()};
}

MetricsRow score_records(TaskId task, const std::string& model, std::optional<std::uint64_t> seed,
                         std::span<const PredictionRecord> gold, std::span<const PredictionRecord> pred,
                         const std::vector<std::string>& universe, WeightSource source,
                         std::span<const std::size_t> training_support) {
  if (gold.empty()) throw ValidationError("gold set is empty");
  const bool multilabel = is_multilabel(task);
  const AlignedLabels a = align_predictions(gold, pred, universe, multilabel);
  return compute_metrics_row(std::string(to_string(task)), model, seed, a.truth, a.pred, multilabel,
                             source, training_support);
}

MetricsRow score_external(const std::filesystem::path& pred_path, const std::filesystem::path& gold_path,
                          TaskId task, const std::string& model,
                          const std::optional<std::vector<std::string>>& universe, WeightSource source,
                          std::span<const std::size_t> training_support) {
  const auto gold = read_predictions(gold_path);
  const auto pred = read_predictions(pred_path);
  const auto u = universe ? *universe : default_universe(task, gold);
  return score_records(task, model, std::nullopt, gold, pred, u, source, training_support);
}

std::vector<ClassReport> error_analysis(const LabelMatrix& truth, const LabelMatrix& pred) {
  const ConfusionCounts c = confusion_counts(truth, pred);
  std::vector<ClassReport> out(truth.cols);
  for (std::size_t j = 0; j < truth.cols; ++j) {
    ClassReport& r = out[j];
    r.label = truth.label_universe[j];
    r.support = c.support[j];
    r.predicted = c.tp[j] + c.fp[j];
    r.never_predicted = r.predicted == 0;
    r.precision = r.predicted ? static_cast<double>(c.tp[j]) / static_cast<double>(r.predicted) : 0.0;
    r.recall = r.support ? static_cast<double>(c.tp[j]) / static_cast<double>(r.support) : 0.0;
    r.f1 = f1_from_counts(c.tp[j], c.fp[j], c.fn[j]);
  }
  std::stable_sort(out.begin(), out.end(), [](const ClassReport& a, const ClassReport& b) {
    if (a.f1 != b.f1) return a.f1 < b.f1;
    return a.label < b.label;
  });
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

void write_error_csv(std::span<const ClassReport> reports, std::ostream& out) {
  out << "label,support,predicted,precision,recall,f1,flag\n";
  for (const auto& r : reports) {
    out << csv_field(r.label) << ',' << r.support << ',' << r.predicted << ','
        << fmt2(100.0 * r.precision) << ',' << fmt2(100.0 * r.recall) << ',' << fmt2(100.0 * r.f1)
        << ',' << (r.never_predicted ? "never-predicted;precision-undefined" : "") << '\n';
  }
}

void write_universe(const std::vector<std::string>& universe, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  for (const auto& l : universe) out << l << '\n';
}

std::vector<std::string> read_universe(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  if (!std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw ParseError(path.string() + ": universe labels must be sorted and unique");
  }
  return out;
}

}  // namespace uttlab
