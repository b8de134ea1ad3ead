#include "uttlab/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "uttlab/error.hpp"

namespace uttlab {

using json = nlohmann::json;

std::size_t Corpus::utterance_count() const {
  std::size_t n = 0;
  for (const auto& s : sessions) n += s.utterances.size();
  return n;
}

namespace {

const json& require_field(const json& record, const char* key, const std::string& source,
                          std::size_t line) {
  auto it = record.find(key);
  if (it == record.end()) {
    throw ParseError(source, line, std::string("missing required field \"") + key + "\"");
  }
  return *it;
}

std::string require_string(const json& record, const char* key, const std::string& source,
                           std::size_t line) {
  const json& v = require_field(record, key, source, line);
  if (!v.is_string()) {
    throw ParseError(source, line, std::string("field \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

struct PendingUtterance {
  Utterance utt;
  std::size_t line = 0;
};

}  // namespace

Corpus parse_transcripts(std::istream& in, const std::string& source_name) {
  std::vector<std::string> session_order;
  std::unordered_map<std::string, std::vector<PendingUtterance>> by_session;

  std::string raw;
  std::size_t line_no = 0;
  std::size_t records = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (raw.find_first_not_of(" \t") == std::string::npos) continue;

    json record;
    try {
      record = json::parse(raw);
    } catch (const json::parse_error& e) {
      throw ParseError(source_name, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source_name, line_no, "record must be a JSON object");

    Utterance u;
    u.session_id = require_string(record, "session", source_name, line_no);
    const json& turn = require_field(record, "turn", source_name, line_no);
    if (!turn.is_number_integer() || turn.get<long long>() < 0) {
      throw ParseError(source_name, line_no, "field \"turn\" must be a non-negative integer");
    }
    u.turn_index = turn.get<std::size_t>();
    u.speaker = require_string(record, "speaker", source_name, line_no);
    u.text = require_string(record, "text", source_name, line_no);

    const json& labels = require_field(record, "labels", source_name, line_no);
    if (!labels.is_array()) throw ParseError(source_name, line_no, "field \"labels\" must be an array");
    if (labels.empty()) throw ParseError(source_name, line_no, "empty label set");
    for (const auto& l : labels) {
      if (!l.is_string()) throw ParseError(source_name, line_no, "labels must be strings");
      auto s = l.get<std::string>();
      if (s.empty()) throw ParseError(source_name, line_no, "empty label string");
      if (std::find(u.fine_labels.begin(), u.fine_labels.end(), s) == u.fine_labels.end()) {
        u.fine_labels.push_back(std::move(s));
      }
    }

    auto [it, inserted] = by_session.try_emplace(u.session_id);
    if (inserted) session_order.push_back(u.session_id);
    it->second.push_back({std::move(u), line_no});
    ++records;
  }
  if (records == 0) throw ParseError(source_name + ": empty file (no records)");

  Corpus corpus;
  corpus.sessions.reserve(session_order.size());
  for (const auto& sid : session_order) {
    auto& pending = by_session[sid];
    std::stable_sort(pending.begin(), pending.end(), [](const auto& a, const auto& b) {
      return a.utt.turn_index < b.utt.turn_index;
    });
    Session session{sid, {}};
    for (std::size_t i = 0; i < pending.size(); ++i) {
      const auto& p = pending[i];
      if (i > 0 && p.utt.turn_index == pending[i - 1].utt.turn_index) {
        throw ParseError(source_name, p.line,
                         "duplicate (session, turn) = (" + sid + ", " +
                             std::to_string(p.utt.turn_index) + ")");
      }
      if (p.utt.turn_index != i) {
        throw ParseError(source_name, p.line,
                         "turn gap in session \"" + sid + "\": expected turn " + std::to_string(i) +
                             ", found " + std::to_string(p.utt.turn_index));
      }
      for (const auto& l : p.utt.fine_labels) corpus.label_inventory.insert(l);
      session.utterances.push_back(std::move(pending[i].utt));
    }
    corpus.sessions.push_back(std::move(session));
  }
  return corpus;
}

Corpus parse_transcripts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open transcript file " + path.string());
  return parse_transcripts(in, path.string());
}

void write_transcripts(const Corpus& corpus, std::ostream& out) {
  for (const auto& session : corpus.sessions) {
    for (const auto& u : session.utterances) {
      nlohmann::ordered_json rec;
      rec["session"] = u.session_id;
      rec["turn"] = u.turn_index;
      rec["speaker"] = u.speaker;
      rec["text"] = u.text;
      rec["labels"] = u.fine_labels;
      out << rec.dump() << '\n';
    }
  }
}

void write_transcripts(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write transcript file " + path.string());
  write_transcripts(corpus, out);
}

// ---------------------------------------------------------------------------

std::string_view to_string(Top top) { return top == Top::emo ? "EMO" : "COG"; }

Taxonomy::Taxonomy(std::map<std::string, TaxonomyEntry> entries) : entries_(std::move(entries)) {
  std::map<std::string, Top> coarse_top;
  for (const auto& [fine, entry] : entries_) {
    if (entry.coarse.empty()) throw ValidationError("taxonomy: empty coarse class for \"" + fine + "\"");
    auto [it, inserted] = coarse_top.emplace(entry.coarse, entry.top);
    if (!inserted && it->second != entry.top) {
      throw ValidationError("taxonomy: coarse class \"" + entry.coarse +
                            "\" appears under both EMO and COG");
    }
  }
}

Taxonomy Taxonomy::parse(std::string_view json_text, const std::string& source_name) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source_name + ": malformed JSON: " + e.what());
  }
  if (!doc.is_object()) throw ParseError(source_name + ": taxonomy must be a JSON object");
  std::map<std::string, TaxonomyEntry> entries;
  for (const auto& [fine, spec] : doc.items()) {
    if (!spec.is_object() || !spec.contains("top") || !spec.contains("coarse") ||
        !spec["top"].is_string() || !spec["coarse"].is_string()) {
      throw ParseError(source_name + ": entry \"" + fine +
                       "\" must be {\"top\": \"EMO\"|\"COG\", \"coarse\": string}");
    }
    auto top = spec["top"].get<std::string>();
    TaxonomyEntry e;
    if (top == "EMO") {
      e.top = Top::emo;
    } else if (top == "COG") {
      e.top = Top::cog;
    } else {
      throw ParseError(source_name + ": entry \"" + fine + "\" has unknown top \"" + top + "\"");
    }
    e.coarse = spec["coarse"].get<std::string>();
    entries.emplace(fine, std::move(e));
  }
  return Taxonomy(std::move(entries));
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open taxonomy file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

const TaxonomyEntry* Taxonomy::find(const std::string& fine_label) const {
  auto it = entries_.find(fine_label);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string Taxonomy::to_json() const {
  json doc = json::object();
  for (const auto& [fine, e] : entries_) {
    doc[fine] = {{"coarse", e.coarse}, {"top", std::string(to_string(e.top))}};
  }
  return doc.dump(2);
}

// ---------------------------------------------------------------------------

std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::emo_cog: return "EMO-COG";
    case TaskId::emo8: return "EMO-8";
    case TaskId::cog8: return "COG-8";
    case TaskId::emo_full: return "EMO-FULL";
    case TaskId::cog_full: return "COG-FULL";
  }
  return "?";
}

TaskId parse_task(std::string_view name) {
  for (TaskId t : kAllTasks) {
    if (to_string(t) == name) return t;
  }
  throw ConfigError("unknown task id \"" + std::string(name) + "\"");
}

int TaskDataset::label_index(const std::string& label) const {
  auto it = std::lower_bound(label_universe.begin(), label_universe.end(), label);
  if (it == label_universe.end() || *it != label) return -1;
  return static_cast<int>(it - label_universe.begin());
}

std::string make_item_id(const std::string& session_id, std::size_t turn_index) {
  return session_id + ":" + std::to_string(turn_index);
}

std::string build_context_window(std::span<const Utterance> session, std::size_t i,
                                 const ContextOptions& options) {
  std::string out;
  for (std::size_t back = options.depth; back > 0; --back) {
    if (back > i) {
      out += options.placeholder;
    } else {
      out += session[i - back].text;
    }
    out += ' ';
    out += options.separator;
    out += ' ';
  }
  out += session[i].text;
  return out;
}

namespace {

/// Task labels for one utterance; empty when the utterance is outside the task.
std::vector<std::string> task_labels(const Utterance& u, const Taxonomy& taxonomy, TaskId task) {
  std::vector<std::string> labels;
  bool any_emo = false;
  for (const auto& fine : u.fine_labels) {
    const TaxonomyEntry* e = taxonomy.find(fine);
    if (e == nullptr) {
      throw ValidationError("fine label \"" + fine + "\" (item " +
                            make_item_id(u.session_id, u.turn_index) + ") is absent from the taxonomy");
    }
    any_emo = any_emo || e->top == Top::emo;
    const Top wanted = (task == TaskId::emo8 || task == TaskId::emo_full) ? Top::emo : Top::cog;
    switch (task) {
      case TaskId::emo_cog:
        break;
      case TaskId::emo8:
      case TaskId::cog8:
        if (e->top == wanted) labels.push_back(e->coarse);
        break;
      case TaskId::emo_full:
      case TaskId::cog_full:
        if (e->top == wanted) labels.push_back(fine);
        break;
    }
  }
  if (task == TaskId::emo_cog) {
    labels.emplace_back(any_emo ? kEmotionLabel : kNonEmotionLabel);
  }
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return labels;
}

}  // namespace

TaskDataset derive_task(const Corpus& corpus, const Taxonomy& taxonomy, TaskId task,
                        const ContextOptions& options, Exec exec) {
  const std::size_t n_sessions = corpus.sessions.size();
  std::vector<std::vector<TaskItem>> per_session(n_sessions);

  auto process = [&](std::size_t s) {
    const auto& utts = corpus.sessions[s].utterances;
    auto& out = per_session[s];
    for (std::size_t i = 0; i < utts.size(); ++i) {
      auto labels = task_labels(utts[i], taxonomy, task);
      if (labels.empty()) continue;
      out.push_back({make_item_id(utts[i].session_id, utts[i].turn_index),
                     build_context_window(utts, i, options), std::move(labels)});
    }
  };

  if (exec == Exec::parallel) {
    // Exceptions may not escape an OpenMP region; keep the first one by session order.
    std::vector<std::string> errors(n_sessions);
#pragma omp parallel for schedule(dynamic)
    for (std::size_t s = 0; s < n_sessions; ++s) {
      try {
        process(s);
      } catch (const std::exception& e) {
        errors[s] = e.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw ValidationError(e);
    }
  } else {
    for (std::size_t s = 0; s < n_sessions; ++s) process(s);
  }

  TaskDataset ds;
  ds.task = task;
  ds.multilabel = is_multilabel(task);
  std::set<std::string> universe;
  if (task == TaskId::emo_cog) {
    universe = {std::string(kEmotionLabel), std::string(kNonEmotionLabel)};
  }
  for (auto& items : per_session) {
    for (auto& item : items) {
      universe.insert(item.labels.begin(), item.labels.end());
      ds.items.push_back(std::move(item));
    }
  }
  ds.label_universe.assign(universe.begin(), universe.end());
  return ds;
}

}  // namespace uttlab
