#include <doctest.h>

#include <sstream>

#include "uttlab/error.hpp"
#include "uttlab/synthetic.hpp"

using namespace uttlab;

namespace {

struct Rates {
  double one = 0, two = 0, three = 0;
};

Rates label_rates(const Corpus& c) {
  Rates r;
  const double n = static_cast<double>(c.utterance_count());
  for (const auto& s : c.sessions) {
    for (const auto& u : s.utterances) {
      const auto k = u.fine_labels.size();
      (k == 1 ? r.one : k == 2 ? r.two : r.three) += 1.0 / n;
    }
  }
  return r;
}

std::string dump(const Corpus& c) {
  std::ostringstream ss;
  write_transcripts(c, ss);
  return ss.str();
}

}  // namespace

TEST_CASE("default rates land within 0.02 of the targets") {
  const Corpus c = generate_synthetic_corpus({});
  CHECK(c.utterance_count() == 5000);
  const Rates r = label_rates(c);
  CHECK(std::abs(r.two - 0.24) <= 0.02);
  CHECK(std::abs(r.three - 0.12) <= 0.02);
}

TEST_CASE("other seeds and custom rates also land near their targets") {
  for (std::uint64_t seed : {2, 3, 4}) {
    SyntheticSpec s;
    s.seed = seed;
    s.two_label_rate = 0.3;
    s.three_label_rate = 0.05;
    const Rates r = label_rates(generate_synthetic_corpus(s));
    CHECK(std::abs(r.two - 0.3) <= 0.02);
    CHECK(std::abs(r.three - 0.05) <= 0.02);
  }
}

TEST_CASE("generation is deterministic per seed") {
  SyntheticSpec s;
  s.size = 800;
  CHECK(dump(generate_synthetic_corpus(s)) == dump(generate_synthetic_corpus(s)));
  SyntheticSpec t = s;
  t.seed = 2;
  CHECK(dump(generate_synthetic_corpus(s)) != dump(generate_synthetic_corpus(t)));
}

TEST_CASE("size one is a valid corpus") {
  SyntheticSpec s;
  s.size = 1;
  const Corpus c = generate_synthetic_corpus(s);
  CHECK(c.utterance_count() == 1);
  std::istringstream in(dump(c));
  CHECK(parse_transcripts(in, "one") == c);
}

TEST_CASE("every label is in the default taxonomy and no label repeats on a turn") {
  SyntheticSpec s;
  s.size = 1500;
  const Corpus c = generate_synthetic_corpus(s);
  const Taxonomy t = default_taxonomy();
  std::size_t emo = 0;
  for (const auto& sess : c.sessions) {
    CHECK(sess.utterances.size() >= 1);
    for (const auto& u : sess.utterances) {
      std::set<std::string> seen(u.fine_labels.begin(), u.fine_labels.end());
      CHECK(seen.size() == u.fine_labels.size());
      bool any = false;
      for (const auto& l : u.fine_labels) {
        REQUIRE(t.find(l) != nullptr);
        any |= t.find(l)->top == Top::emo;
      }
      emo += any;
      CHECK_FALSE(u.text.empty());
    }
  }
  // emotional share sits near the configured rate
  CHECK(std::abs(static_cast<double>(emo) / 1500.0 - s.emotion_rate) < 0.05);
}

TEST_CASE("invalid specs are rejected") {
  SyntheticSpec s;
  s.two_label_rate = 1.2;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s = {};
  s.two_label_rate = 0.7;
  s.three_label_rate = 0.5;
  CHECK_THROWS_AS(generate_synthetic_corpus(s), ValidationError);
  s = {};
  s.size = 0;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s = {};
  s.min_session = 10;
  s.max_session = 5;
  CHECK_THROWS_AS(validate(s), ValidationError);
  s = {};
  s.emotion_rate = -0.1;
  CHECK_THROWS_AS(validate(s), ValidationError);
}
