#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "uttlab/exec.hpp"

namespace uttlab {

/// Sorted-index sparse row. Indices are strictly increasing and < dimension;
/// zero weights are never stored.
struct SparseVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::size_t dimension = 0;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  /// Binary search; 0 for absent entries.
  double get(std::uint32_t index) const;
  double norm() const;

  bool operator==(const SparseVector&) const = default;
};

/// Drops zeros, sorts and merges duplicate indices by summation.
SparseVector make_sparse(std::size_t dimension,
                         std::vector<std::pair<std::uint32_t, double>> entries);

using TokenList = std::vector<std::string>;

class StopwordList {
 public:
  StopwordList() = default;
  StopwordList(std::string version, std::unordered_set<std::string> words)
      : version_(std::move(version)), words_(std::move(words)) {}

  /// The bundled English list (data/stopwords_en.txt, version "en-v1").
  static const StopwordList& english();
  /// One word per line; a first line starting with "#" carries the version tag.
  static StopwordList load(const std::filesystem::path& path);

  bool contains(const std::string& token) const { return words_.count(token) != 0; }
  std::size_t size() const { return words_.size(); }
  const std::string& version() const { return version_; }

 private:
  std::string version_;
  std::unordered_set<std::string> words_;
};

inline const std::set<std::string>& default_placeholders() {
  static const std::set<std::string> tokens{"[PAD]", "[SEP]"};
  return tokens;
}

/// Lowercases, splits on Unicode whitespace, removes every non-alphanumeric
/// code point from each token, and drops empty tokens, stopwords and the raw
/// placeholder/separator tokens. Order and multiplicity are preserved.
TokenList normalize_tokens(std::string_view text,
                           const std::set<std::string>& placeholders = default_placeholders(),
                           const StopwordList& stopwords = StopwordList::english());

inline constexpr std::size_t kDefaultMaxVocab = 3034;

struct Vocabulary {
  std::vector<std::string> terms;  // index order
  std::vector<double> idf;
  std::vector<std::size_t> df;     // empty when loaded from disk
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t n_documents = 0;
  std::size_t max_size = kDefaultMaxVocab;

  std::size_t size() const { return terms.size(); }
  /// Column of a term, or -1.
  long find(const std::string& term) const;
};

/// Keeps the max_vocab terms of highest document frequency (ties by term) and
/// assigns indices in that order. idf(t) = ln((1+n)/(1+df(t))) + 1.
Vocabulary fit_tfidf(std::span<const TokenList> train_docs, std::size_t max_vocab = kDefaultMaxVocab);

/// count(t) * idf(t) over in-vocabulary terms, L2-normalized unless all-zero.
SparseVector transform_tfidf(const Vocabulary& vocab, const TokenList& doc);

std::vector<SparseVector> transform_tfidf_batch(const Vocabulary& vocab,
                                                std::span<const TokenList> docs,
                                                Exec exec = Exec::parallel);

/// "term<TAB>idf" per line in index order after a
/// "# n_docs=<n> max_vocab=<m> size=<k>" header. idf round-trips exactly.
void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace uttlab
