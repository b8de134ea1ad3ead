// uttlab command line: staged experiment pipeline, external scoring and
// synthetic corpus generation.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "uttlab/error.hpp"
#include "uttlab/experiment.hpp"
#include "uttlab/scoring.hpp"
#include "uttlab/synthetic.hpp"

namespace fs = std::filesystem;
using namespace uttlab;

namespace {

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

ExperimentConfig require_config(const GlobalOptions& g, bool seed_is_split_seed) {
  if (g.config.empty()) throw ConfigError("--config is required for this command");
  ExperimentConfig c = load_config(g.config);
  if (g.seed) {
    if (seed_is_split_seed) {
      c.split_seed = *g.seed;
    } else {
      c.seeds = {*g.seed};
    }
  }
  return c;
}

fs::path require_out(const GlobalOptions& g) {
  if (g.out.empty()) throw ConfigError("--out is required for this command");
  fs::create_directories(g.out);
  return g.out;
}

std::string row_csv(const MetricsRow& r) {
  std::string s = "task,model,seed,w_f1,m_f1,acc,hl\n";
  s += r.task + ',' + r.model + ',' + (r.seed ? std::to_string(*r.seed) : "") + ',' + fmt2(r.w_f1) + ',' +
       fmt2(r.m_f1) + ',' + (r.acc ? fmt2(*r.acc) : "") + ',' + (r.hl ? fmt2(*r.hl) : "") + '\n';
  return s;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 3;
  if (dynamic_cast<const ParseError*>(&e)) return 4;
  if (dynamic_cast<const ValidationError*>(&e)) return 5;
  if (dynamic_cast<const IoError*>(&e)) return 6;
  if (dynamic_cast<const TrainingError*>(&e)) return 7;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return 6;
  if (dynamic_cast<const Error*>(&e)) return 8;
  return 1;
}

const char* error_name(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const ValidationError*>(&e)) return "ValidationError";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const TrainingError*>(&e)) return "TrainingError";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "IoError";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Utterance labeling pipeline: TF-IDF features, classical learners, classifier chains"};
  app.set_version_flag("--version", std::string(UTTLAB_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Seed override");
  app.add_option("--out", g.out, "Output directory");

  auto* ingest = app.add_subcommand("ingest", "Parse corpus and taxonomy, write per-task datasets");
  auto* split = app.add_subcommand("split", "Stratified train/test split manifests (--seed sets the split seed)");
  auto* train = app.add_subcommand("train", "Fit vocabularies and models (--seed runs a single seed)");
  auto* evaluate = app.add_subcommand("evaluate", "Predict the test split of every trained model");
  auto* report = app.add_subcommand("report", "Score predictions; write CSVs, error analyses and tables");
  auto* run = app.add_subcommand("run", "split + train + evaluate + report");

  auto* score = app.add_subcommand("score-external", "Score an external prediction file against gold");
  std::string pred_path, gold_path, task_name, universe_path, model_name = "external";
  score->add_option("--pred", pred_path, "Prediction JSONL")->required();
  score->add_option("--gold", gold_path, "Gold JSONL")->required();
  score->add_option("--task", task_name, "EMO-COG, EMO-8, COG-8, EMO-FULL or COG-FULL")->required();
  score->add_option("--universe", universe_path, "Label universe file (one label per line)");
  score->add_option("--model", model_name, "Model name for the report row");

  auto* synth = app.add_subcommand("gen-synth", "Generate a synthetic corpus, taxonomy and config");
  SyntheticSpec spec;
  synth->add_option("--size", spec.size, "Utterances")->capture_default_str();
  synth->add_option("--two-label-rate", spec.two_label_rate)->capture_default_str();
  synth->add_option("--three-label-rate", spec.three_label_rate)->capture_default_str();
  synth->add_option("--emotion-rate", spec.emotion_rate)->capture_default_str();
  synth->add_option("--cross-top-rate", spec.cross_top_rate)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      const IngestSummary s = stage_ingest(require_config(g, false), require_out(g));
      std::cout << "ingested " << s.utterances << " utterances in " << s.sessions << " sessions\n";
    } else if (split->parsed()) {
      stage_split(require_config(g, true), require_out(g));
    } else if (train->parsed()) {
      stage_train(require_config(g, false), require_out(g));
    } else if (evaluate->parsed()) {
      stage_evaluate(require_config(g, false), require_out(g));
    } else if (report->parsed()) {
      const ExperimentConfig c = require_config(g, false);
      std::cout << render_report(stage_report(c, require_out(g)), c);
    } else if (run->parsed()) {
      const ExperimentConfig c = require_config(g, false);
      std::cout << render_report(run_experiment(c, require_out(g)), c);
    } else if (score->parsed()) {
      const TaskId task = parse_task(task_name);
      std::optional<std::vector<std::string>> universe;
      if (!universe_path.empty()) universe = read_universe(universe_path);
      const MetricsRow row = score_external(pred_path, gold_path, task, model_name, universe);
      const std::string csv = row_csv(row);
      std::cout << csv;
      if (!g.out.empty()) write_file_atomic(require_out(g) / "external.csv", csv);
    } else if (synth->parsed()) {
      if (g.seed) spec.seed = *g.seed;
      const fs::path out = require_out(g);
      const Corpus corpus = generate_synthetic_corpus(spec);
      std::ostringstream ss;
      write_transcripts(corpus, ss);
      write_file_atomic(out / "corpus.jsonl", ss.str());
      write_file_atomic(out / "taxonomy.json", default_taxonomy().to_json());
      nlohmann::ordered_json cfg;
      cfg["corpus"] = "corpus.jsonl";
      cfg["taxonomy"] = "taxonomy.json";
      write_file_atomic(out / "config.json", cfg.dump(2) + '\n');
      std::cout << "wrote " << corpus.utterance_count() << " utterances to " << (out / "corpus.jsonl").string()
                << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << error_name(e) << ": " << e.what() << '\n';
    return exit_code_for(e);
  }
  return 0;
}
