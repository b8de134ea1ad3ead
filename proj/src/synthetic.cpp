#include "uttlab/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "uttlab/error.hpp"
#include "uttlab/rng.hpp"

namespace uttlab {

namespace {

struct FineLabel {
  const char* name;
  Top top;
  const char* coarse;
  std::array<const char*, 6> keywords;
};

// Listed from most to least frequent within each top.
constexpr FineLabel kLabels[] = {
    {"express sadness", Top::emo, "sadness", {"sad", "sobbing", "tears", "lonely", "grief", "heartbroken"}},
    {"express fear", Top::emo, "fear", {"afraid", "scared", "panic", "worried", "nervous", "terrified"}},
    {"express anger", Top::emo, "anger", {"angry", "furious", "mad", "rage", "annoyed", "resent"}},
    {"express joy", Top::emo, "joy", {"happy", "glad", "delighted", "cheerful", "wonderful", "smile"}},
    {"express trust", Top::emo, "trust", {"trust", "rely", "faith", "safe", "confide", "depend"}},
    {"express anticipation", Top::emo, "anticipation", {"hope", "expect", "eager", "looking", "soon", "await"}},
    {"express surprise", Top::emo, "surprise", {"surprised", "shocked", "unexpected", "wow", "sudden", "astonished"}},
    {"express disgust", Top::emo, "disgust", {"disgusting", "gross", "revolting", "sick", "nasty", "repulsed"}},
    {"describe event", Top::cog, "description", {"yesterday", "happened", "went", "meeting", "weekend", "drove"}},
    {"agree", Top::cog, "agreement", {"yes", "agree", "exactly", "absolutely", "sure", "correct"}},
    {"ask for clarification", Top::cog, "clarification", {"mean", "explain", "unclear", "specifically", "confusing", "understand"}},
    {"suggest", Top::cog, "suggestion", {"try", "suggest", "recommend", "option", "consider", "plan"}},
    {"paraphrase", Top::cog, "clarification", {"saying", "sounds", "hear", "words", "basically", "summarize"}},
    {"elaborate", Top::cog, "clarification", {"details", "furthermore", "example", "expand", "additionally", "elaborating"}},
    {"confirm", Top::cog, "clarification", {"confirmed", "truly", "definitely", "certain", "affirm", "verified"}},
    {"clarify", Top::cog, "clarification", {"precisely", "actually", "clearly", "point", "specify", "distinguish"}},
    {"ask for confirmation", Top::cog, "clarification", {"right", "correct", "isnt", "confirm", "checking", "verify"}},
};

constexpr const char* kFiller[] = {
    "the",   "and",    "i",      "you",   "it",     "is",     "that",  "to",     "of",
    "we",    "so",     "just",   "think", "know",   "time",   "today", "thing",  "people",
    "maybe", "okay",   "like",   "work",  "family", "home",   "week",  "really", "kind",
    "this",  "was",    "about",  "feel",  "day",    "little", "talk",  "lot",    "still",
};

constexpr std::size_t kNumLabels = std::size(kLabels);

std::vector<std::size_t> labels_of(Top top) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < kNumLabels; ++i) {
    if (kLabels[i].top == top) out.push_back(i);
  }
  return out;
}

/// Weighted draw of one label from `pool` (1/(rank+1) weights), skipping taken ones.
std::size_t draw_label(Rng& rng, const std::vector<std::size_t>& pool, const std::vector<char>& taken) {
  double total = 0.0;
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (!taken[pool[r]]) total += 1.0 / static_cast<double>(r + 1);
  }
  double u = rng.uniform() * total;
  std::size_t last = pool.front();
  for (std::size_t r = 0; r < pool.size(); ++r) {
    if (taken[pool[r]]) continue;
    last = pool[r];
    u -= 1.0 / static_cast<double>(r + 1);
    if (u < 0.0) return pool[r];
  }
  return last;
}

}  // namespace

void validate(const SyntheticSpec& spec) {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw ValidationError(std::string("synthetic ") + name + " must lie in [0,1]");
    }
  };
  rate(spec.two_label_rate, "two_label_rate");
  rate(spec.three_label_rate, "three_label_rate");
  rate(spec.emotion_rate, "emotion_rate");
  rate(spec.cross_top_rate, "cross_top_rate");
  rate(spec.keyword_noise, "keyword_noise");
  rate(spec.emotion_persistence, "emotion_persistence");
  if (spec.two_label_rate + spec.three_label_rate > 1.0) {
    throw ValidationError("synthetic two_label_rate + three_label_rate exceeds 1");
  }
  if (spec.size == 0) throw ValidationError("synthetic corpus size must be >= 1");
  if (spec.min_session == 0 || spec.min_session > spec.max_session) {
    throw ValidationError("synthetic session length range is empty");
  }
}

Taxonomy default_taxonomy() {
  std::map<std::string, TaxonomyEntry> entries;
  for (const auto& l : kLabels) entries[l.name] = {l.top, l.coarse};
  return Taxonomy(std::move(entries));
}

Corpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(derive_seed(spec.seed, "synthetic-corpus"));
  const auto emo = labels_of(Top::emo);
  const auto cog = labels_of(Top::cog);

  // Extra labels can bring EMO into a COG-primary turn; solve for the primary
  // EMO rate that yields emotion_rate overall, then for the entry rate of the
  // two-state chain whose stationary share is that primary rate.
  const double x = spec.cross_top_rate;
  const double cross = spec.two_label_rate * x + spec.three_label_rate * (1.0 - (1.0 - x) * (1.0 - x));
  const double primary = cross < 1.0 ? std::clamp((spec.emotion_rate - cross) / (1.0 - cross), 0.0, 1.0) : 0.0;
  const double enter = primary < 1.0
                           ? std::min(1.0, primary * (1.0 - spec.emotion_persistence) / (1.0 - primary))
                           : 1.0;

  Corpus corpus;
  std::size_t produced = 0;
  while (produced < spec.size) {
    Session session;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%04zu", corpus.sessions.size() + 1);
    session.id = id;
    const std::size_t span = spec.max_session - spec.min_session + 1;
    std::size_t length = spec.min_session + rng.below(span);
    length = std::min(length, spec.size - produced);

    bool previous_emo = false;
    for (std::size_t turn = 0; turn < length; ++turn) {
      const double u = rng.uniform();
      const std::size_t n_labels =
          u < spec.three_label_rate ? 3 : (u < spec.three_label_rate + spec.two_label_rate ? 2 : 1);
      const double p_emo = turn == 0 ? primary : (previous_emo ? spec.emotion_persistence : enter);
      const bool primary_emo = rng.uniform() < p_emo;
      previous_emo = primary_emo;
      std::vector<char> taken(kNumLabels, 0);
      std::vector<std::size_t> chosen;
      for (std::size_t k = 0; k < n_labels; ++k) {
        bool use_emo = primary_emo;
        if (k > 0 && rng.uniform() < spec.cross_top_rate) use_emo = !use_emo;
        const std::size_t pick = draw_label(rng, use_emo ? emo : cog, taken);
        taken[pick] = 1;
        chosen.push_back(pick);
      }

      std::vector<std::string> words;
      for (std::size_t label : chosen) {
        const std::size_t n_kw = 1 + rng.below(2);
        for (std::size_t q = 0; q < n_kw; ++q) {
          std::size_t source = label;
          if (rng.uniform() < spec.keyword_noise) source = rng.below(kNumLabels);
          words.emplace_back(kLabels[source].keywords[rng.below(6)]);
        }
      }
      const std::size_t n_fill = 2 + rng.below(6);
      for (std::size_t q = 0; q < n_fill; ++q) words.emplace_back(kFiller[rng.below(std::size(kFiller))]);
      rng.shuffle(words);

      std::string text;
      for (std::size_t q = 0; q < words.size(); ++q) {
        std::string w = words[q];
        if (q == 0) w[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
        if (q) text += (rng.below(8) == 0 ? ", " : " ");
        text += w;
      }
      text += rng.below(4) == 0 ? "?" : ".";

      Utterance utt;
      utt.session_id = session.id;
      utt.turn_index = turn;
      utt.speaker = turn % 2 == 0 ? "counselor" : "client";
      utt.text = std::move(text);
      for (std::size_t label : chosen) {
        utt.fine_labels.emplace_back(kLabels[label].name);
        corpus.label_inventory.insert(kLabels[label].name);
      }
      session.utterances.push_back(std::move(utt));
    }
    produced += length;
    corpus.sessions.push_back(std::move(session));
  }
  return corpus;
}

}  // namespace uttlab
