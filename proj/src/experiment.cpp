#include "uttlab/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "uttlab/chain.hpp"
#include "uttlab/error.hpp"
#include "uttlab/label_matrix.hpp"
#include "uttlab/rng.hpp"
#include "uttlab/scoring.hpp"
#include "uttlab/text_features.hpp"

namespace uttlab {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kModelIds[] = {"baseline", "nb", "adaboost_nb", "rf", "gd_svm", "logreg"};

std::string hex16(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <class T>
T get_field(const json& doc, const char* key, const char* what) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field \"") + key + "\" must be " + what);
  }
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

bool is_known_model(std::string_view id) {
  return std::find(std::begin(kModelIds), std::end(kModelIds), id) != std::end(kModelIds);
}

std::string_view display_name(std::string_view model_id) {
  if (model_id == "baseline") return "Baseline";
  if (model_id == "nb") return "NB";
  if (model_id == "adaboost_nb") return "AdaBoost+NB";
  if (model_id == "rf") return "RF";
  if (model_id == "gd_svm") return "GD-SVM";
  if (model_id == "logreg") return "LR";
  return model_id;
}

// ---------------------------------------------------------------------------
// Config

fs::path ExperimentConfig::corpus_path() const {
  const fs::path p(corpus);
  return p.is_absolute() ? p : base_dir / p;
}

fs::path ExperimentConfig::taxonomy_path() const {
  const fs::path p(taxonomy);
  return p.is_absolute() ? p : base_dir / p;
}

LearnerSpec ExperimentConfig::learner(LearnerKind kind) const {
  LearnerSpec spec;
  spec.kind = kind;
  auto it = hyperparameters.find(std::string(to_string(kind)));
  if (it != hyperparameters.end()) apply_hyperparameters(spec, it->second);
  return spec;
}

ojson ExperimentConfig::canonical() const {
  ojson doc;
  doc["corpus"] = corpus;
  doc["taxonomy"] = taxonomy;
  doc["tasks"] = ojson::array();
  for (TaskId t : tasks) doc["tasks"].push_back(std::string(to_string(t)));
  doc["models"] = models;
  doc["seeds"] = seeds;
  doc["split_ratio"] = split_ratio;
  doc["split_seed"] = split_seed;
  doc["context_depth"] = context_depth;
  doc["max_vocab"] = max_vocab;
  doc["weight_source"] = std::string(to_string(weight_source));
  ojson hp = ojson::object();
  for (std::string_view id : kModelIds) {
    if (id == kBaselineId) continue;
    const LearnerSpec spec = learner(parse_learner(id));
    hp[std::string(id)] = ojson::parse(spec_to_json(spec).dump());
  }
  doc["hyperparameters"] = hp;
  doc["threads"] = threads;
  return doc;
}

std::string ExperimentConfig::digest() const {
  ojson doc = canonical();
  doc.erase("threads");  // results do not depend on it
  return hex16(fnv1a64(doc.dump()));
}

ExperimentConfig parse_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known{"corpus",        "taxonomy",  "tasks",         "models",
                                           "seeds",         "split_ratio", "split_seed", "context_depth",
                                           "max_vocab",     "weight_source", "hyperparameters", "threads"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field \"" + key + "\"");
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  if (!doc.contains("corpus")) throw ConfigError("config is missing \"corpus\"");
  if (!doc.contains("taxonomy")) throw ConfigError("config is missing \"taxonomy\"");
  c.corpus = get_field<std::string>(doc, "corpus", "a string");
  c.taxonomy = get_field<std::string>(doc, "taxonomy", "a string");
  if (doc.contains("tasks")) {
    c.tasks.clear();
    for (const auto& t : get_field<std::vector<std::string>>(doc, "tasks", "a list of task ids")) {
      const TaskId id = parse_task(t);
      if (std::find(c.tasks.begin(), c.tasks.end(), id) != c.tasks.end()) {
        throw ConfigError("task " + t + " listed twice");
      }
      c.tasks.push_back(id);
    }
    if (c.tasks.empty()) throw ConfigError("config lists no tasks");
  }
  if (doc.contains("models")) {
    c.models = get_field<std::vector<std::string>>(doc, "models", "a list of model ids");
    std::set<std::string> seen;
    for (const auto& m : c.models) {
      if (!is_known_model(m)) throw ConfigError("unknown model id \"" + m + "\"");
      if (!seen.insert(m).second) throw ConfigError("model " + m + " listed twice");
    }
    if (c.models.empty()) throw ConfigError("config lists no models");
  }
  if (doc.contains("seeds")) {
    c.seeds = get_field<std::vector<std::uint64_t>>(doc, "seeds", "a list of non-negative integers");
    if (c.seeds.empty()) throw ConfigError("seeds must be non-empty");
    std::set<std::uint64_t> uniq(c.seeds.begin(), c.seeds.end());
    if (uniq.size() != c.seeds.size()) throw ConfigError("seeds contain duplicates");
  }
  if (doc.contains("split_ratio")) c.split_ratio = get_field<double>(doc, "split_ratio", "a number");
  if (!(c.split_ratio > 0.0 && c.split_ratio < 1.0)) {
    throw ConfigError("split_ratio must lie in (0,1)");
  }
  if (doc.contains("split_seed")) {
    c.split_seed = get_field<std::uint64_t>(doc, "split_seed", "a non-negative integer");
  }
  if (doc.contains("context_depth")) {
    c.context_depth = get_field<std::size_t>(doc, "context_depth", "a non-negative integer");
  }
  if (doc.contains("max_vocab")) {
    c.max_vocab = get_field<std::size_t>(doc, "max_vocab", "a positive integer");
    if (c.max_vocab == 0) throw ConfigError("max_vocab must be >= 1");
  }
  if (doc.contains("weight_source")) {
    c.weight_source = parse_weight_source(get_field<std::string>(doc, "weight_source", "a string"));
  }
  if (doc.contains("hyperparameters")) {
    const json& hp = doc.at("hyperparameters");
    if (!hp.is_object()) throw ConfigError("hyperparameters must be an object");
    for (const auto& [id, overrides] : hp.items()) {
      if (id == kBaselineId) throw ConfigError("the baseline has no hyperparameters");
      LearnerSpec probe;
      probe.kind = parse_learner(id);
      apply_hyperparameters(probe, overrides);  // validates
      c.hyperparameters[id] = overrides;
    }
  }
  if (doc.contains("threads")) {
    c.threads = get_field<int>(doc, "threads", "an integer");
    if (c.threads < 0) throw ConfigError("threads must be >= 0");
  }
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  const std::string text = read_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

// ---------------------------------------------------------------------------
// Cells and seeds

std::string Cell::name() const {
  std::string s = std::string(to_string(task)) + "__" + model;
  if (seed) s += "__seed" + std::to_string(*seed);
  return s;
}

std::vector<Cell> plan_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (TaskId task : config.tasks) {
    for (const auto& model : config.models) {
      if (model != kBaselineId && is_seed_sensitive(parse_learner(model))) {
        for (auto s : config.seeds) cells.push_back({task, model, s});
      } else {
        cells.push_back({task, model, std::nullopt});
      }
    }
  }
  return cells;
}

std::uint64_t split_seed_for(const ExperimentConfig& config, TaskId task) {
  return derive_seed(config.split_seed, "split/" + std::string(to_string(task)));
}

std::uint64_t model_seed_for(const Cell& cell) {
  return derive_seed(cell.seed.value_or(0), std::string(to_string(cell.task)) + "/" + cell.model);
}

// ---------------------------------------------------------------------------
// Files

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void require_file(const fs::path& path, const char* stage) {
  if (!fs::exists(path)) {
    throw IoError("missing " + path.string() + " (run `" + stage + "` first)");
  }
}

struct Inputs {
  Corpus corpus;
  Taxonomy taxonomy;
};

Inputs load_inputs(const ExperimentConfig& config) {
  if (config.threads > 0) set_threads(config.threads);
  return {parse_transcripts(config.corpus_path()), Taxonomy::load(config.taxonomy_path())};
}

ContextOptions context_options(const ExperimentConfig& config) {
  ContextOptions o;
  o.depth = config.context_depth;
  return o;
}

fs::path manifest_path(const fs::path& out, TaskId task, const char* fold) {
  return out / "splits" / (std::string(to_string(task)) + "." + fold + ".txt");
}

/// Subset of dataset by id list, in list order.
TaskDataset select_items(const TaskDataset& dataset, const std::vector<std::string>& ids,
                         const fs::path& source) {
  std::map<std::string, const TaskItem*> by_id;
  for (const auto& item : dataset.items) by_id[item.item_id] = &item;
  TaskDataset out;
  out.task = dataset.task;
  out.label_universe = dataset.label_universe;
  out.multilabel = dataset.multilabel;
  for (const auto& id : ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      throw ValidationError(source.string() + ": item " + id + " is not in the " +
                            std::string(to_string(dataset.task)) + " dataset");
    }
    out.items.push_back(*it->second);
  }
  return out;
}

struct TaskSplit {
  TaskDataset full;
  TaskDataset train;
  TaskDataset test;
};

TaskSplit load_split(const ExperimentConfig& config, const Inputs& in, TaskId task, const fs::path& out) {
  TaskSplit s;
  s.full = derive_task(in.corpus, in.taxonomy, task, context_options(config));
  const fs::path train_path = manifest_path(out, task, "train");
  const fs::path test_path = manifest_path(out, task, "test");
  require_file(train_path, "split");
  require_file(test_path, "split");
  s.train = select_items(s.full, read_split_manifest(train_path).item_ids, train_path);
  s.test = select_items(s.full, read_split_manifest(test_path).item_ids, test_path);
  if (s.train.items.size() + s.test.items.size() != s.full.items.size()) {
    throw ValidationError("split manifests for " + std::string(to_string(task)) +
                          " do not cover the dataset; rerun `split`");
  }
  return s;
}

std::vector<TokenList> tokenize(const TaskDataset& d) {
  std::vector<TokenList> docs(d.items.size());
  const auto n = static_cast<std::ptrdiff_t>(d.items.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) docs[i] = normalize_tokens(d.items[i].context_text);
  return docs;
}

fs::path vocab_path(const fs::path& out, TaskId task) {
  return out / "vocab" / (std::string(to_string(task)) + ".tsv");
}
fs::path universe_path(const fs::path& out, TaskId task) {
  return out / "universe" / (std::string(to_string(task)) + ".txt");
}
fs::path gold_path(const fs::path& out, TaskId task) {
  return out / "gold" / (std::string(to_string(task)) + ".jsonl");
}
fs::path model_path(const fs::path& out, const Cell& cell) {
  return out / "models" / (cell.name() + ".json");
}
fs::path prediction_path(const fs::path& out, const Cell& cell) {
  return out / "predictions" / (cell.name() + ".jsonl");
}

std::string dataset_jsonl(const TaskDataset& d) {
  std::string s;
  for (const auto& item : d.items) {
    ojson line;
    line["item_id"] = item.item_id;
    line["context"] = item.context_text;
    line["labels"] = item.labels;
    s += line.dump() + '\n';
  }
  return s;
}

std::vector<int> single_labels(const TaskDataset& d) {
  std::vector<int> y;
  y.reserve(d.items.size());
  for (const auto& item : d.items) y.push_back(d.label_index(item.labels.front()));
  return y;
}

std::string predictions_text(std::span<const PredictionRecord> records) {
  std::ostringstream ss;
  write_predictions(records, ss);
  return ss.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Stages

IngestSummary stage_ingest(const ExperimentConfig& config, const fs::path& out) {
  const Inputs in = load_inputs(config);
  IngestSummary s;
  s.sessions = in.corpus.sessions.size();
  s.utterances = in.corpus.utterance_count();
  s.fine_labels = in.corpus.label_inventory.size();
  for (const auto& session : in.corpus.sessions) {
    for (const auto& u : session.utterances) {
      const std::size_t k = u.fine_labels.size();
      (k == 1 ? s.one_label : k == 2 ? s.two_labels : s.three_plus) += 1;
    }
  }
  ensure_dir(out / "datasets");
  {
    std::ostringstream ss;
    write_transcripts(in.corpus, ss);
    write_file_atomic(out / "corpus.jsonl", ss.str());
  }
  for (TaskId task : config.tasks) {
    const TaskDataset d = derive_task(in.corpus, in.taxonomy, task, context_options(config));
    s.task_items[std::string(to_string(task))] = d.items.size();
    write_file_atomic(out / "datasets" / (std::string(to_string(task)) + ".jsonl"), dataset_jsonl(d));
  }
  std::ostringstream txt;
  const double n = static_cast<double>(std::max<std::size_t>(s.utterances, 1));
  char buf[160];
  txt << "sessions " << s.sessions << "\nutterances " << s.utterances << "\nfine_labels "
      << s.fine_labels << '\n';
  std::snprintf(buf, sizeof buf, "label_count_rates one=%.4f two=%.4f three_plus=%.4f\n",
                static_cast<double>(s.one_label) / n, static_cast<double>(s.two_labels) / n,
                static_cast<double>(s.three_plus) / n);
  txt << buf;
  for (const auto& [task, items] : s.task_items) txt << "task " << task << " items " << items << '\n';
  write_file_atomic(out / "ingest.txt", txt.str());
  return s;
}

void stage_split(const ExperimentConfig& config, const fs::path& out) {
  const Inputs in = load_inputs(config);
  ensure_dir(out / "splits");
  for (TaskId task : config.tasks) {
    const TaskDataset d = derive_task(in.corpus, in.taxonomy, task, context_options(config));
    const SplitPair split = stratified_split(d, config.split_ratio, split_seed_for(config, task));
    const fs::path train = manifest_path(out, task, "train");
    const fs::path test = manifest_path(out, task, "test");
    fs::path train_tmp = train, test_tmp = test;
    train_tmp += ".tmp";
    test_tmp += ".tmp";
    write_split_manifest(split, train_tmp, test_tmp);
    fs::rename(train_tmp, train);
    fs::rename(test_tmp, test);
  }
}

void stage_train(const ExperimentConfig& config, const fs::path& out) {
  const Inputs in = load_inputs(config);
  for (const char* dir : {"vocab", "universe", "models"}) ensure_dir(out / dir);
  const auto cells = plan_cells(config);
  for (TaskId task : config.tasks) {
    const TaskSplit split = load_split(config, in, task, out);
    const auto docs = tokenize(split.train);
    const Vocabulary vocab = fit_tfidf(docs, config.max_vocab);
    {
      fs::path tmp = vocab_path(out, task);
      tmp += ".tmp";
      save_vocabulary(vocab, tmp);
      fs::rename(tmp, vocab_path(out, task));
    }
    std::string universe_text;
    for (const auto& l : split.full.label_universe) universe_text += l + '\n';
    write_file_atomic(universe_path(out, task), universe_text);

    const auto X = transform_tfidf_batch(vocab, docs);
    const auto& universe = split.full.label_universe;
    for (const Cell& cell : cells) {
      if (cell.task != task) continue;
      json doc;
      if (cell.model == kBaselineId) {
        std::vector<std::vector<std::string>> labels;
        for (const auto& item : split.train.items) labels.push_back(item.labels);
        doc = {{"format", "uttlab-baseline/1"}, {"label", majority_baseline(labels)}};
      } else {
        const LearnerSpec spec = config.learner(parse_learner(cell.model));
        const std::uint64_t seed = model_seed_for(cell);
        if (split.full.multilabel) {
          const LabelMatrix Y = label_matrix(split.train);
          doc = chain_to_json(fit_chain(spec, X, Y, default_chain_order(Y), seed));
        } else {
          const auto y = single_labels(split.train);
          doc = model_to_json(train_model(spec, X, y, static_cast<int>(universe.size()), seed), universe);
        }
      }
      write_file_atomic(model_path(out, cell), doc.dump() + '\n');
    }
  }
}

void stage_evaluate(const ExperimentConfig& config, const fs::path& out) {
  const Inputs in = load_inputs(config);
  for (const char* dir : {"gold", "predictions"}) ensure_dir(out / dir);
  const auto cells = plan_cells(config);
  for (TaskId task : config.tasks) {
    const TaskSplit split = load_split(config, in, task, out);
    require_file(vocab_path(out, task), "train");
    const Vocabulary vocab = load_vocabulary(vocab_path(out, task));
    const auto X = transform_tfidf_batch(vocab, tokenize(split.test));
    std::vector<std::string> ids;
    for (const auto& item : split.test.items) ids.push_back(item.item_id);
    write_file_atomic(gold_path(out, task), predictions_text(gold_records(split.test)));

    for (const Cell& cell : cells) {
      if (cell.task != task) continue;
      const fs::path mp = model_path(out, cell);
      require_file(mp, "train");
      json doc;
      {
        std::ifstream f(mp);
        try {
          doc = json::parse(f);
        } catch (const json::parse_error& e) {
          throw ParseError(mp.string() + ": " + e.what());
        }
      }
      std::vector<PredictionRecord> records;
      if (cell.model == kBaselineId) {
        const std::string label = doc.at("label").get<std::string>();
        for (const auto& id : ids) records.push_back({id, {label}});
      } else if (split.full.multilabel) {
        const ChainModel chain = chain_from_json(doc);
        records = records_from_matrix(ids, predict_chain(chain, X));
      } else {
        const LoadedModel m = model_from_json(doc);
        const Predictions p = predict(m.model, X);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          records.push_back({ids[i], {m.class_names.at(static_cast<std::size_t>(p.labels[i]))}});
        }
      }
      write_file_atomic(prediction_path(out, cell), predictions_text(records));
    }
  }
}

ReportTable stage_report(const ExperimentConfig& config, const fs::path& out) {
  ReportTable table;
  table.config_digest = config.digest();
  table.version = UTTLAB_VERSION;
  ensure_dir(out / "errors");
  const auto cells = plan_cells(config);

  std::optional<Inputs> in;
  if (config.weight_source == WeightSource::training) in = load_inputs(config);

  for (TaskId task : config.tasks) {
    require_file(gold_path(out, task), "evaluate");
    require_file(universe_path(out, task), "train");
    const auto gold = read_predictions(gold_path(out, task));
    const auto universe = read_universe(universe_path(out, task));
    std::vector<std::size_t> training_support;
    if (in) {
      const TaskSplit split = load_split(config, *in, task, out);
      const LabelMatrix Y = label_matrix(split.train);
      for (std::size_t j = 0; j < Y.cols; ++j) training_support.push_back(Y.column_sum(j));
    }
    for (const auto& model : config.models) {
      std::vector<MetricsRow> runs;
      for (const Cell& cell : cells) {
        if (cell.task != task || cell.model != model) continue;
        require_file(prediction_path(out, cell), "evaluate");
        const auto pred = read_predictions(prediction_path(out, cell));
        MetricsRow row = score_records(task, model, cell.seed, gold, pred, universe,
                                       config.weight_source, training_support);
        const AlignedLabels a = align_predictions(gold, pred, universe, is_multilabel(task));
        std::size_t empty = 0;
        for (std::size_t i = 0; i < a.pred.rows; ++i) empty += a.pred.row_empty(i);
        table.empty_rows[std::string(to_string(task)) + "__" + model] += empty;
        std::ostringstream csv;
        write_error_csv(error_analysis(a.truth, a.pred), csv);
        write_file_atomic(out / "errors" / (cell.name() + ".csv"), csv.str());
        runs.push_back(row);
        table.runs.push_back(std::move(row));
      }
      table.rows.push_back(aggregate_runs(runs));
    }
  }
  write_file_atomic(out / "runs.csv", runs_csv(table));
  write_file_atomic(out / "aggregate.csv", aggregate_csv(table));
  write_file_atomic(out / "report.txt", render_report(table, config));
  return table;
}

ReportTable run_experiment(const ExperimentConfig& config, const fs::path& out) {
  ensure_dir(out);
  stage_split(config, out);
  stage_train(config, out);
  stage_evaluate(config, out);
  return stage_report(config, out);
}

// ---------------------------------------------------------------------------
// Rendering

std::string runs_csv(const ReportTable& table) {
  std::string s = "task,model,seed,w_f1,m_f1,acc,hl\n";
  for (const auto& r : table.runs) {
    s += r.task + ',' + r.model + ',' + (r.seed ? std::to_string(*r.seed) : "") + ',' + fmt2(r.w_f1) +
         ',' + fmt2(r.m_f1) + ',' + (r.acc ? fmt2(*r.acc) : "") + ',' + (r.hl ? fmt2(*r.hl) : "") + '\n';
  }
  return s;
}

std::string aggregate_csv(const ReportTable& table) {
  std::string s = "task,model,n_runs,w_f1_mean,w_f1_std,m_f1_mean,m_f1_std,acc_mean,acc_std,hl_mean,hl_std\n";
  auto pair = [](const std::optional<Summary>& v) {
    return v ? fmt2(v->mean) + ',' + fmt2(v->std) : std::string(",");
  };
  for (const auto& r : table.rows) {
    s += r.task + ',' + r.model + ',' + std::to_string(r.n_runs) + ',' + fmt2(r.w_f1.mean) + ',' +
         fmt2(r.w_f1.std) + ',' + fmt2(r.m_f1.mean) + ',' + fmt2(r.m_f1.std) + ',' + pair(r.acc) + ',' +
         pair(r.hl) + '\n';
  }
  return s;
}

namespace {

/// Pads to a width in code points so "±" counts as one column.
std::string pad(std::string s, std::size_t width) {
  std::size_t cols = 0;
  for (unsigned char c : s) cols += (c & 0xC0) != 0x80;
  if (cols < width) s.append(width - cols, ' ');
  return s;
}

}  // namespace

std::string render_report(const ReportTable& table, const ExperimentConfig& config) {
  std::ostringstream out;
  out << "uttlab " << table.version << "  config " << table.config_digest << "  F1 weights: "
      << to_string(config.weight_source) << " supports\n";

  for (TaskId task : config.tasks) {
    const std::string name(to_string(task));
    const bool multilabel = is_multilabel(task);
    std::vector<const AggregateRow*> rows;
    for (const auto& r : table.rows) {
      if (r.task == name) rows.push_back(&r);
    }
    if (rows.empty()) continue;

    // Best per column on the 2-decimal values shown; lower is better for HL.
    auto shown = [](double v) { return round_half_up(v, 2); };
    double best_w = -1, best_m = -1, best_third = multilabel ? 1e9 : -1;
    for (const auto* r : rows) {
      best_w = std::max(best_w, shown(r->w_f1.mean));
      best_m = std::max(best_m, shown(r->m_f1.mean));
      if (multilabel) {
        best_third = std::min(best_third, shown(r->hl->mean));
      } else {
        best_third = std::max(best_third, shown(r->acc->mean));
      }
    }
    auto cell = [&](const Summary& s, std::size_t n_runs, bool best) {
      std::string text = fmt2(s.mean);
      if (n_runs > 1) text += " ± " + fmt2(s.std);
      if (best) text += " *";
      return text;
    };

    out << '\n' << name << (multilabel ? " (multilabel)" : " (single-label)") << '\n';
    out << pad("Model", 14) << pad("W-F1", 18) << pad("M-F1", 18) << (multilabel ? "HL" : "ACC") << '\n';
    for (const auto* r : rows) {
      const Summary& third = multilabel ? *r->hl : *r->acc;
      out << pad(std::string(display_name(r->model)), 14)
          << pad(cell(r->w_f1, r->n_runs, shown(r->w_f1.mean) == best_w), 18)
          << pad(cell(r->m_f1, r->n_runs, shown(r->m_f1.mean) == best_m), 18)
          << cell(third, r->n_runs, shown(third.mean) == best_third) << '\n';
    }
    if (multilabel) {
      std::string empties;
      for (const auto* r : rows) {
        auto it = table.empty_rows.find(name + "__" + r->model);
        if (it == table.empty_rows.end() || it->second == 0) continue;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f",
                      static_cast<double>(it->second) / static_cast<double>(r->n_runs));
        empties += (empties.empty() ? "" : ", ") + std::string(display_name(r->model)) + " " + buf;
      }
      out << "Items with no predicted label (kept as-is, mean per run): " << (empties.empty() ? "none" : empties)
          << '\n';
    }
  }
  out << "\n* best value per column. Seeded models show mean ± sample std over "
      << config.seeds.size() << " seed(s); deterministic models run once.\n";
  return out.str();
}

}  // namespace uttlab
