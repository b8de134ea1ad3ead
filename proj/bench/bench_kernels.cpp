// Serial vs OpenMP timings of the data-parallel kernels on a synthetic corpus.
// Also checks that both paths agree, since that is the point of keeping the
// serial version.
//
//   uttlab_bench [utterances=5000] [repeats=3]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "uttlab/chain.hpp"
#include "uttlab/corpus.hpp"
#include "uttlab/model.hpp"
#include "uttlab/synthetic.hpp"
#include "uttlab/text_features.hpp"

using namespace uttlab;

namespace {

double best_ms(int repeats, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, bool same) {
  std::printf("%-24s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n", name, serial, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  SyntheticSpec spec;
  spec.size = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 5000;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads: %d, utterances: %zu\n", max_threads(), spec.size);

  const Corpus corpus = generate_synthetic_corpus(spec);
  const Taxonomy taxonomy = default_taxonomy();

  TaskDataset d_serial, d_parallel;
  const double derive_s = best_ms(repeats, [&] { d_serial = derive_task(corpus, taxonomy, TaskId::emo_cog, {}, Exec::serial); });
  const double derive_p = best_ms(repeats, [&] { d_parallel = derive_task(corpus, taxonomy, TaskId::emo_cog, {}, Exec::parallel); });
  report("derive_task", derive_s, derive_p, d_serial.items == d_parallel.items);

  std::vector<TokenList> docs;
  for (const auto& item : d_serial.items) docs.push_back(normalize_tokens(item.context_text));
  const Vocabulary vocab = fit_tfidf(docs);
  std::vector<SparseVector> xs, xp;
  const double tf_s = best_ms(repeats, [&] { xs = transform_tfidf_batch(vocab, docs, Exec::serial); });
  const double tf_p = best_ms(repeats, [&] { xp = transform_tfidf_batch(vocab, docs, Exec::parallel); });
  bool same = xs.size() == xp.size();
  for (std::size_t i = 0; same && i < xs.size(); ++i) {
    same = xs[i].indices == xp[i].indices && xs[i].values == xp[i].values;
  }
  report("tfidf transform", tf_s, tf_p, same);

  std::vector<int> y;
  for (const auto& item : d_serial.items) y.push_back(d_serial.label_index(item.labels.front()));
  LearnerSpec rf;
  rf.kind = LearnerKind::random_forest;
  Model fs_model, fp_model;
  const double rf_s = best_ms(1, [&] { fs_model = train_model(rf, xs, y, 2, 7, Exec::serial); });
  const double rf_p = best_ms(1, [&] { fp_model = train_model(rf, xs, y, 2, 7, Exec::parallel); });
  report("forest fit (100 trees)", rf_s, rf_p,
         std::get<ForestModel>(fs_model).trees == std::get<ForestModel>(fp_model).trees);

  Predictions ps, pp;
  const double pr_s = best_ms(repeats, [&] { ps = predict(fs_model, xs, Exec::serial); });
  const double pr_p = best_ms(repeats, [&] { pp = predict(fs_model, xs, Exec::parallel); });
  report("forest predict", pr_s, pr_p, ps.labels == pp.labels && ps.scores == pp.scores);

  const TaskDataset emo = derive_task(corpus, taxonomy, TaskId::emo_full);
  std::vector<TokenList> emo_docs;
  for (const auto& item : emo.items) emo_docs.push_back(normalize_tokens(item.context_text));
  const Vocabulary emo_vocab = fit_tfidf(emo_docs);
  const auto X = transform_tfidf_batch(emo_vocab, emo_docs);
  const LabelMatrix Y = label_matrix(emo);
  LearnerSpec svm;
  svm.kind = LearnerKind::sgd_svm;
  ChainModel cs, cp;
  const double ch_s = best_ms(1, [&] { cs = fit_chain(svm, X, Y, default_chain_order(Y), 3, Exec::serial); });
  const double ch_p = best_ms(1, [&] { cp = fit_chain(svm, X, Y, default_chain_order(Y), 3, Exec::parallel); });
  report("chain fit (GD-SVM)", ch_s, ch_p, chain_to_json(cs) == chain_to_json(cp));

  LabelMatrix ms, mp;
  const double cpred_s = best_ms(repeats, [&] { ms = predict_chain(cs, X, Exec::serial); });
  const double cpred_p = best_ms(repeats, [&] { mp = predict_chain(cs, X, Exec::parallel); });
  report("chain predict", cpred_s, cpred_p, ms == mp);
  return 0;
}
