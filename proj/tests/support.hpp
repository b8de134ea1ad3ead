#pragma once
// Shared fixtures: temp directories, small sparse datasets, file helpers.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "uttlab/rng.hpp"
#include "uttlab/text_features.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("uttlab-" + tag + "-" + std::to_string(::getpid()));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline uttlab::SparseVector dense(std::vector<double> v) {
  std::vector<std::pair<std::uint32_t, double>> e;
  for (std::size_t i = 0; i < v.size(); ++i) e.emplace_back(static_cast<std::uint32_t>(i), v[i]);
  return uttlab::make_sparse(v.size(), std::move(e));
}

struct Dataset {
  std::vector<uttlab::SparseVector> X;
  std::vector<int> y;
};

/// Non-negative sparse rows whose class leans on class-specific columns, so
/// every learner has something to find.
inline Dataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t d, int K,
                              double density = 0.3) {
  uttlab::Rng rng(seed);
  Dataset ds;
  for (std::size_t i = 0; i < n; ++i) {
    const int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(K)));
    std::vector<std::pair<std::uint32_t, double>> e;
    for (std::size_t j = 0; j < d; ++j) {
      if (rng.uniform() < density) e.emplace_back(static_cast<std::uint32_t>(j), rng.uniform());
    }
    e.emplace_back(static_cast<std::uint32_t>(static_cast<std::size_t>(c) % d), 1.0 + rng.uniform());
    ds.X.push_back(uttlab::make_sparse(d, std::move(e)));
    ds.y.push_back(c);
  }
  return ds;
}

}  // namespace testing
