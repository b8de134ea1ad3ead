#include "uttlab/text_features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "uttlab/error.hpp"

namespace uttlab {

double SparseVector::get(std::uint32_t index) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), index);
  if (it == indices.end() || *it != index) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

SparseVector make_sparse(std::size_t dimension,
                         std::vector<std::pair<std::uint32_t, double>> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  SparseVector v;
  v.dimension = dimension;
  for (std::size_t i = 0; i < entries.size();) {
    const std::uint32_t idx = entries[i].first;
    if (idx >= dimension) throw ValidationError("sparse index " + std::to_string(idx) + " >= dimension");
    double sum = 0.0;
    for (; i < entries.size() && entries[i].first == idx; ++i) sum += entries[i].second;
    if (sum != 0.0) {
      v.indices.push_back(idx);
      v.values.push_back(sum);
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Tokenization

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

char32_t decode(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int len = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    ++pos;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++pos;
    return kInvalid;
  }
  if (pos + len > s.size()) {
    ++pos;
    return kInvalid;
  }
  for (int k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return kInvalid;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

void encode(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool is_space(char32_t c) {
  return (c >= 0x09 && c <= 0x0D) || c == 0x20 || c == 0x85 || c == 0xA0 || c == 0x1680 ||
         (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_alnum(char32_t c) {
  if (c == kInvalid) return false;
  if (c < 0x80) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
  }
  // Latin-1 punctuation and symbols, keeping the few letters/digits in the block.
  if (c <= 0xBF) return c == 0xAA || c == 0xB2 || c == 0xB3 || c == 0xB5 || c == 0xB9 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  // Punctuation, symbol, arrow, math, box-drawing and emoji blocks.
  if (c >= 0x2000 && c <= 0x2BFF) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c >= 0xFE00 && c <= 0xFE0F) return false;
  if (c >= 0xFE30 && c <= 0xFE4F) return false;
  if ((c >= 0xFF00 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) ||
      (c >= 0xFF5B && c <= 0xFF65)) {
    return false;
  }
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;
  return true;
}

char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0x80) return c;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 0x20;
  if (c >= 0x100 && c <= 0x137 && (c % 2 == 0)) return c + 1;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 0x20;
  if (c >= 0x410 && c <= 0x42F) return c + 0x20;
  if (c >= 0x400 && c <= 0x40F) return c + 0x50;
  return c;
}

}  // namespace

TokenList normalize_tokens(std::string_view text, const std::set<std::string>& placeholders,
                           const StopwordList& stopwords) {
  TokenList tokens;
  std::size_t pos = 0;
  std::string raw, cleaned;
  auto flush = [&] {
    if (raw.empty()) return;
    if (!placeholders.count(raw) && !cleaned.empty() && !stopwords.contains(cleaned)) {
      tokens.push_back(cleaned);
    }
    raw.clear();
    cleaned.clear();
  };
  while (pos < text.size()) {
    const std::size_t start = pos;
    const char32_t c = decode(text, pos);
    if (is_space(c)) {
      flush();
      continue;
    }
    raw.append(text.substr(start, pos - start));
    if (is_alnum(c)) encode(to_lower(c), cleaned);
  }
  flush();
  return tokens;
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path.string());
  std::string line, version = path.filename().string();
  std::unordered_set<std::string> words;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && line.rfind('#', 0) == 0) {
      auto sp = line.find_last_of(' ');
      version = line.substr(sp + 1);
    } else if (!line.empty() && line[0] != '#') {
      words.insert(line);
    }
    first = false;
  }
  return StopwordList(std::move(version), std::move(words));
}

// ---------------------------------------------------------------------------
// TF-IDF

long Vocabulary::find(const std::string& term) const {
  auto it = index.find(term);
  return it == index.end() ? -1 : static_cast<long>(it->second);
}

Vocabulary fit_tfidf(std::span<const TokenList> train_docs, std::size_t max_vocab) {
  if (max_vocab == 0) throw ValidationError("max_vocab must be positive");
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : train_docs) {
    std::vector<const std::string*> uniq;
    uniq.reserve(doc.size());
    for (const auto& t : doc) uniq.push_back(&t);
    std::sort(uniq.begin(), uniq.end(), [](auto* a, auto* b) { return *a < *b; });
    uniq.erase(std::unique(uniq.begin(), uniq.end(), [](auto* a, auto* b) { return *a == *b; }),
               uniq.end());
    for (const auto* t : uniq) ++df[*t];
  }
  if (df.empty()) throw ValidationError("cannot fit TF-IDF: no terms in the training documents");

  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_vocab) ranked.resize(max_vocab);

  Vocabulary vocab;
  vocab.n_documents = train_docs.size();
  vocab.max_size = max_vocab;
  const double n = static_cast<double>(vocab.n_documents);
  for (auto& [term, count] : ranked) {
    vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
    vocab.terms.push_back(term);
    vocab.df.push_back(count);
    vocab.idf.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return vocab;
}

SparseVector transform_tfidf(const Vocabulary& vocab, const TokenList& doc) {
  std::vector<std::pair<std::uint32_t, double>> counts;
  counts.reserve(doc.size());
  for (const auto& t : doc) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) counts.emplace_back(it->second, 1.0);
  }
  SparseVector v = make_sparse(vocab.size(), std::move(counts));
  double sq = 0.0;
  for (std::size_t k = 0; k < v.nnz(); ++k) {
    v.values[k] *= vocab.idf[v.indices[k]];
    sq += v.values[k] * v.values[k];
  }
  if (sq > 0.0) {
    const double inv = 1.0 / std::sqrt(sq);
    for (double& w : v.values) w *= inv;
  }
  return v;
}

std::vector<SparseVector> transform_tfidf_batch(const Vocabulary& vocab,
                                                std::span<const TokenList> docs, Exec exec) {
  std::vector<SparseVector> out(docs.size());
  const std::size_t n = docs.size();
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < n; ++i) out[i] = transform_tfidf(vocab, docs[i]);
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = transform_tfidf(vocab, docs[i]);
  }
  return out;
}

void save_vocabulary(const Vocabulary& vocab, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write vocabulary file " + path.string());
  out << "# n_docs=" << vocab.n_documents << " max_vocab=" << vocab.max_size
      << " size=" << vocab.size() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    auto res = std::to_chars(buf, buf + sizeof buf, vocab.idf[i]);
    out << vocab.terms[i] << '\t' << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocabulary file " + path.string());
  const std::string source = path.string();
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ParseError(source, 1, "missing vocabulary header");
  }
  Vocabulary vocab;
  auto header_value = [&](const std::string& key) -> std::size_t {
    auto p = line.find(key + "=");
    if (p == std::string::npos) throw ParseError(source, 1, "header lacks " + key);
    return std::stoull(line.substr(p + key.size() + 1));
  };
  vocab.n_documents = header_value("n_docs");
  vocab.max_size = header_value("max_vocab");
  const std::size_t expected = header_value("size");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(source, line_no, "expected term<TAB>idf");
    double idf = 0.0;
    auto res = std::from_chars(line.data() + tab + 1, line.data() + line.size(), idf);
    if (res.ec != std::errc()) throw ParseError(source, line_no, "bad idf value");
    std::string term = line.substr(0, tab);
    if (!vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size())).second) {
      throw ParseError(source, line_no, "duplicate term \"" + term + "\"");
    }
    vocab.terms.push_back(std::move(term));
    vocab.idf.push_back(idf);
  }
  if (vocab.size() != expected) throw ParseError(source + ": header size does not match term count");
  return vocab;
}

}  // namespace uttlab
