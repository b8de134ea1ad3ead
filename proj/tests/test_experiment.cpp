#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "uttlab/error.hpp"
#include "uttlab/experiment.hpp"
#include "uttlab/scoring.hpp"
#include "uttlab/synthetic.hpp"

using namespace uttlab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Corpus and taxonomy files in dir; returns a config doc pointing at them.
json write_inputs(const testing::TempDir& dir, std::size_t size = 600) {
  SyntheticSpec s;
  s.size = size;
  s.seed = 3;
  write_transcripts(generate_synthetic_corpus(s), dir / "corpus.jsonl");
  testing::spit(dir / "taxonomy.json", default_taxonomy().to_json());
  return {{"corpus", "corpus.jsonl"}, {"taxonomy", "taxonomy.json"}};
}

ExperimentConfig config_from(const testing::TempDir& dir, json doc) {
  return parse_config(doc, dir.path());
}

const char* kReportFiles[] = {"report.txt", "runs.csv", "aggregate.csv"};

}  // namespace

TEST_CASE("config: strict parsing") {
  const json base{{"corpus", "c.jsonl"}, {"taxonomy", "t.json"}};
  const ExperimentConfig c = parse_config(base, "/data");
  CHECK(c.corpus_path() == fs::path("/data/c.jsonl"));
  CHECK(c.tasks.size() == 5);
  CHECK(c.models.size() == 6);
  CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3});
  CHECK(c.max_vocab == 3034);
  CHECK(c.learner(LearnerKind::adaboost_nb).adaboost.n_estimators == 50);
  CHECK(c.learner(LearnerKind::random_forest).forest.n_trees == 100);
  CHECK(c.learner(LearnerKind::sgd_svm).sgd.epochs == 1000);
  CHECK(c.learner(LearnerKind::logreg).logreg.max_iter == 100);

  auto with = [&](const char* key, json value) {
    json d = base;
    d[key] = std::move(value);
    return d;
  };
  CHECK_THROWS_AS(parse_config(with("colour", 1), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("tasks", {"EMO-9"}), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("models", {"svm"}), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("seeds", json::array()), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("split_ratio", 1.0), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("split_ratio", "0.9"), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("hyperparameters", {{"rf", {{"n_trees", -1}}}}), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(with("hyperparameters", {{"rf", {{"depth", 3}}}}), "."), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"corpus", "c"}}, "."), ConfigError);

  const ExperimentConfig hp = parse_config(with("hyperparameters", {{"rf", {{"n_trees", 7}}}}), ".");
  CHECK(hp.learner(LearnerKind::random_forest).forest.n_trees == 7);
  CHECK(hp.digest() != c.digest());
  CHECK(parse_config(with("threads", 4), ".").digest() == c.digest());
}

TEST_CASE("config files resolve paths against their own directory") {
  testing::TempDir dir("cfgpath");
  fs::create_directories(dir / "sub");
  testing::spit(dir / "sub/config.json", R"({"corpus": "../c.jsonl", "taxonomy": "/abs/t.json"})");
  const ExperimentConfig c = load_config(dir / "sub/config.json");
  CHECK(fs::weakly_canonical(c.corpus_path()) == fs::weakly_canonical(dir / "c.jsonl"));
  CHECK(c.taxonomy_path() == fs::path("/abs/t.json"));
  testing::spit(dir / "bad.json", "{");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "none.json"), IoError);
}

TEST_CASE("plan: deterministic models once, seeded models per seed") {
  const ExperimentConfig c = parse_config(
      {{"corpus", "c"}, {"taxonomy", "t"}, {"tasks", {"EMO-COG", "EMO-8"}}, {"models", {"nb", "rf", "baseline"}},
       {"seeds", {4, 5}}},
      ".");
  const auto cells = plan_cells(c);
  REQUIRE(cells.size() == 8);
  CHECK(cells[0].name() == "EMO-COG__nb");
  CHECK(cells[1].name() == "EMO-COG__rf__seed4");
  CHECK(cells[2].name() == "EMO-COG__rf__seed5");
  CHECK(cells[3].name() == "EMO-COG__baseline");
  CHECK(cells[4].task == TaskId::emo8);
  CHECK(model_seed_for(cells[1]) != model_seed_for(cells[2]));
  CHECK(split_seed_for(c, TaskId::emo_cog) != split_seed_for(c, TaskId::emo8));
}

TEST_CASE("baseline run satisfies the closed forms for its test split") {
  testing::TempDir dir("exp-baseline");
  json doc = write_inputs(dir);
  doc["tasks"] = {"EMO-COG"};
  doc["models"] = {"baseline"};
  doc["seeds"] = {7};
  const ReportTable t = run_experiment(config_from(dir, doc), dir / "out");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].n_runs == 1);

  const auto gold = read_predictions(dir / "out/gold/EMO-COG.jsonl");
  std::size_t non = 0;
  for (const auto& g : gold) non += g.labels[0] == "NON-EMOTION";
  const double p = static_cast<double>(non) / static_cast<double>(gold.size());
  REQUIRE(p > 0.5);
  CHECK(t.rows[0].acc->mean == doctest::Approx(100 * p));
  CHECK(t.rows[0].m_f1.mean == doctest::Approx(100 * p / (1 + p)));
  CHECK(t.rows[0].w_f1.mean == doctest::Approx(100 * 2 * p * p / (1 + p)));
}

TEST_CASE("full pipeline: determinism, staged equals run, thread independence, scoring paths agree") {
  testing::TempDir dir("exp-full");
  json doc = write_inputs(dir);
  doc["tasks"] = {"EMO-COG", "EMO-8", "COG-FULL"};
  doc["hyperparameters"] = {{"rf", {{"n_trees", 10}}},
                            {"gd_svm", {{"epochs", 30}}},
                            {"adaboost_nb", {{"n_estimators", 10}}}};
  const ExperimentConfig config = config_from(dir, doc);
  const ReportTable a = run_experiment(config, dir / "a");
  run_experiment(config, dir / "b");

  const ExperimentConfig staged_config = config_from(dir, doc);
  stage_ingest(staged_config, dir / "c");
  stage_split(staged_config, dir / "c");
  stage_train(staged_config, dir / "c");
  stage_evaluate(staged_config, dir / "c");
  stage_report(staged_config, dir / "c");

  json threaded = doc;
  threaded["threads"] = 3;
  run_experiment(config_from(dir, threaded), dir / "d");
  set_threads(1);

  for (const char* f : kReportFiles) {
    const std::string ref = testing::slurp(dir / "a" / f);
    CHECK_FALSE(ref.empty());
    CHECK_MESSAGE(ref == testing::slurp(dir / "b" / f), f);
    CHECK_MESSAGE(ref == testing::slurp(dir / "c" / f), f);
    CHECK_MESSAGE(ref == testing::slurp(dir / "d" / f), f);
  }
  for (const auto& entry : fs::directory_iterator(dir / "a/models")) {
    const auto name = entry.path().filename();
    CHECK(testing::slurp(entry.path()) == testing::slurp(dir / "b/models" / name));
    CHECK(testing::slurp(entry.path()) == testing::slurp(dir / "d/models" / name));
  }
  CHECK(fs::exists(dir / "c/ingest.txt"));

  // one aggregated row per (task, model); seeded rows span exactly three runs
  REQUIRE(a.rows.size() == 18);
  for (const auto& r : a.rows) {
    const bool seeded = r.model == "rf" || r.model == "gd_svm";
    CHECK(r.n_runs == (seeded ? 3u : 1u));
    std::vector<double> w;
    for (const auto& run : a.runs) {
      if (run.task == r.task && run.model == r.model) w.push_back(run.w_f1);
    }
    CHECK(w.size() == r.n_runs);
    CHECK(r.w_f1.std == doctest::Approx(oracle::sample_std(w)));
    CHECK(r.hl.has_value() == (r.task != "EMO-COG"));
  }

  // every run row equals what score_external computes from the written files
  for (const auto& run : a.runs) {
    std::string name = run.task + "__" + run.model + (run.seed ? "__seed" + std::to_string(*run.seed) : "");
    const auto universe = read_universe(dir / "a/universe" / (run.task + ".txt"));
    const MetricsRow ext = score_external(dir / "a/predictions" / (name + ".jsonl"),
                                          dir / "a/gold" / (run.task + ".jsonl"), parse_task(run.task),
                                          run.model, universe);
    MetricsRow expect = run;
    expect.seed.reset();
    CHECK_MESSAGE(ext == expect, name);
    CHECK(fs::exists(dir / "a/errors" / (name + ".csv")));
  }

  const std::string report = testing::slurp(dir / "a/report.txt");
  CHECK(report.find("EMO-COG (single-label)") != std::string::npos);
  CHECK(report.find("EMO-8 (multilabel)") != std::string::npos);
  CHECK(report.find("Items with no predicted label") != std::string::npos);
  CHECK(report.find(" ± ") != std::string::npos);
  CHECK(report.find(config.digest()) != std::string::npos);
}

TEST_CASE("TF-IDF vocabulary is fitted on the training split only") {
  testing::TempDir dir("exp-vocab");
  json doc = write_inputs(dir, 400);
  doc["tasks"] = {"COG-8"};
  doc["models"] = {"nb"};
  doc["max_vocab"] = 100000;
  const ExperimentConfig c = config_from(dir, doc);
  run_experiment(c, dir / "out");

  const TaskDataset full = derive_task(parse_transcripts(dir / "corpus.jsonl"), default_taxonomy(), TaskId::cog8);
  const auto train_ids = read_split_manifest(dir / "out/splits/COG-8.train.txt").item_ids;
  const std::set<std::string> train_set(train_ids.begin(), train_ids.end());
  std::vector<TokenList> train_docs, test_docs;
  for (const auto& item : full.items) {
    (train_set.count(item.item_id) ? train_docs : test_docs).push_back(normalize_tokens(item.context_text));
  }
  REQUIRE_FALSE(test_docs.empty());
  const Vocabulary refit = fit_tfidf(train_docs, 100000);
  const Vocabulary saved = load_vocabulary(dir / "out/vocab/COG-8.tsv");
  CHECK(saved.terms == refit.terms);
  CHECK(saved.idf == refit.idf);
  CHECK(saved.n_documents == train_docs.size());
}

TEST_CASE("stages report what is missing") {
  testing::TempDir dir("exp-missing");
  json doc = write_inputs(dir, 200);
  doc["tasks"] = {"EMO-COG"};
  doc["models"] = {"nb"};
  const ExperimentConfig c = config_from(dir, doc);
  try {
    stage_train(c, dir / "out");
    FAIL("expected IoError");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("split") != std::string::npos);
  }
  json bad = doc;
  bad["corpus"] = "nope.jsonl";
  CHECK_THROWS_AS(run_experiment(config_from(dir, bad), dir / "out2"), IoError);
}

TEST_CASE("atomic writes leave no temporary files") {
  testing::TempDir dir("atomic");
  write_file_atomic(dir / "x.txt", "hello");
  write_file_atomic(dir / "x.txt", "world");
  CHECK(testing::slurp(dir / "x.txt") == "world");
  std::size_t n = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir.path())) ++n;
  CHECK(n == 1);
}
