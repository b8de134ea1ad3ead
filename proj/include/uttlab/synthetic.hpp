#pragma once

#include <cstddef>
#include <cstdint>

#include "uttlab/corpus.hpp"

namespace uttlab {

struct SyntheticSpec {
  std::size_t size = 5000;          // utterances
  double two_label_rate = 0.24;     // exactly two fine labels
  double three_label_rate = 0.12;   // three fine labels
  double emotion_rate = 1373.0 / 7965.0;  // utterances carrying any EMO label
  double cross_top_rate = 0.1;      // an extra label comes from the other top
  /// Chance that a turn following an emotional turn is emotional again;
  /// emotional talk comes in stretches rather than isolated turns.
  double emotion_persistence = 0.5;
  double keyword_noise = 0.1;       // keyword borrowed from an unrelated label
  std::size_t min_session = 30;
  std::size_t max_session = 120;
  std::uint64_t seed = 1;
};

/// Throws ValidationError on rates outside [0,1], two + three > 1, size 0 or
/// an empty session-length range.
void validate(const SyntheticSpec& spec);

/// The taxonomy shipped as data/taxonomy_default.json: the eight Plutchik
/// emotions plus the cognitive classes clarification, agreement, description
/// and suggestion.
Taxonomy default_taxonomy();

/// Texts are keyword bags per fine label padded with filler words, so every
/// label is learnable. Deterministic per spec (seed included).
Corpus generate_synthetic_corpus(const SyntheticSpec& spec);

}  // namespace uttlab
