#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "uttlab/corpus.hpp"
#include "uttlab/error.hpp"
#include "uttlab/rng.hpp"

namespace uttlab {

namespace {

constexpr int kTrain = 0;
constexpr int kTest = 1;

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Total excess of |test_count - target| over the allowed slack of 1.
double violation(const std::vector<int>& test_count, const std::vector<double>& target) {
  double v = 0.0;
  for (std::size_t l = 0; l < target.size(); ++l) {
    v += std::max(0.0, std::abs(test_count[l] - target[l]) - 1.0);
  }
  return v;
}

}  // namespace

SplitPair stratified_split(const TaskDataset& dataset, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw ValidationError("split ratio must lie in (0,1), got " + shortest(ratio));
  }
  if (dataset.items.empty()) throw ValidationError("cannot split an empty dataset");

  const std::size_t n = dataset.items.size();
  const std::size_t n_labels = dataset.label_universe.size();
  const double share[2] = {ratio, 1.0 - ratio};

  std::vector<std::vector<int>> item_labels(n);
  std::vector<std::vector<std::size_t>> label_items(n_labels);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& l : dataset.items[i].labels) {
      int idx = dataset.label_index(l);
      if (idx < 0) throw ValidationError("item " + dataset.items[i].item_id + " has label outside the universe: " + l);
      item_labels[i].push_back(idx);
      label_items[idx].push_back(i);
    }
  }

  std::vector<double> desired[2];
  double desired_total[2];
  for (int f : {kTrain, kTest}) {
    desired[f].resize(n_labels);
    for (std::size_t l = 0; l < n_labels; ++l) desired[f][l] = share[f] * label_items[l].size();
    desired_total[f] = share[f] * n;
  }

  Rng rng(seed);
  std::vector<int> fold(n, -1);
  std::vector<std::size_t> remaining(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) remaining[l] = label_items[l].size();
  std::size_t unassigned = n;

  auto assign = [&](std::size_t i, int f) {
    fold[i] = f;
    --unassigned;
    desired_total[f] -= 1.0;
    for (int l : item_labels[i]) {
      desired[f][l] -= 1.0;
      --remaining[l];
    }
  };

  auto pick_fold = [&](int label) {
    const double a = label >= 0 ? desired[kTrain][label] : 0.0;
    const double b = label >= 0 ? desired[kTest][label] : 0.0;
    if (a != b) return a > b ? kTrain : kTest;
    if (desired_total[kTrain] != desired_total[kTest]) {
      return desired_total[kTrain] > desired_total[kTest] ? kTrain : kTest;
    }
    return static_cast<int>(rng.below(2));
  };

  while (unassigned > 0) {
    int rarest = -1;
    for (std::size_t l = 0; l < n_labels; ++l) {
      if (remaining[l] == 0) continue;
      if (rarest < 0 || remaining[l] < remaining[rarest]) rarest = static_cast<int>(l);
    }
    if (rarest < 0) {
      // Only unlabeled items remain.
      for (std::size_t i = 0; i < n; ++i) {
        if (fold[i] < 0) assign(i, pick_fold(-1));
      }
      break;
    }
    std::vector<std::size_t> batch;
    for (std::size_t i : label_items[rarest]) {
      if (fold[i] < 0) batch.push_back(i);
    }
    rng.shuffle(batch);
    for (std::size_t i : batch) assign(i, pick_fold(rarest));
  }

  // Co-occurring labels can drag a label's test count outside the +-1 band.
  // Greedy single-item moves repair that; items carrying a singleton label stay in train.
  std::vector<int> test_count(n_labels, 0);
  std::vector<double> target(n_labels);
  for (std::size_t l = 0; l < n_labels; ++l) target[l] = share[kTest] * label_items[l].size();
  for (std::size_t i = 0; i < n; ++i) {
    if (fold[i] == kTest) {
      for (int l : item_labels[i]) ++test_count[l];
    }
  }
  double current = violation(test_count, target);
  for (int pass = 0; current > 0.0 && pass < 64; ++pass) {
    bool improved = false;
    for (std::size_t i = 0; i < n && current > 0.0; ++i) {
      const int delta = fold[i] == kTest ? -1 : 1;
      if (delta > 0) {
        bool pinned = std::any_of(item_labels[i].begin(), item_labels[i].end(),
                                  [&](int l) { return label_items[l].size() == 1; });
        if (pinned) continue;
      }
      double before = 0.0, after = 0.0;
      for (int l : item_labels[i]) {
        before += std::max(0.0, std::abs(test_count[l] - target[l]) - 1.0);
        after += std::max(0.0, std::abs(test_count[l] + delta - target[l]) - 1.0);
      }
      if (after < before) {
        for (int l : item_labels[i]) test_count[l] += delta;
        fold[i] = fold[i] == kTest ? kTrain : kTest;
        current = violation(test_count, target);
        improved = true;
      }
    }
    if (!improved) break;
  }

  SplitPair out;
  out.seed = seed;
  out.ratio = ratio;
  for (TaskDataset* part : {&out.train, &out.test}) {
    part->task = dataset.task;
    part->label_universe = dataset.label_universe;
    part->multilabel = dataset.multilabel;
  }
  for (std::size_t i = 0; i < n; ++i) {
    (fold[i] == kTest ? out.test : out.train).items.push_back(dataset.items[i]);
  }
  return out;
}

namespace {

void write_manifest(const TaskDataset& part, const SplitPair& split, const char* fold_name,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write split manifest " + path.string());
  out << "# seed=" << split.seed << " ratio=" << shortest(split.ratio) << " fold=" << fold_name
      << " task=" << to_string(part.task) << '\n';
  for (const auto& item : part.items) out << item.item_id << '\n';
}

}  // namespace

void write_split_manifest(const SplitPair& split, const std::filesystem::path& train_path,
                          const std::filesystem::path& test_path) {
  write_manifest(split.train, split, "train", train_path);
  write_manifest(split.test, split, "test", test_path);
}

SplitManifest read_split_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open split manifest " + path.string());
  SplitManifest m;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw ParseError(path.string(), 1, "missing manifest header");
  }
  auto field = [&](const std::string& key) -> std::string {
    auto pos = line.find(key + "=");
    if (pos == std::string::npos) throw ParseError(path.string(), 1, "header lacks " + key);
    auto start = pos + key.size() + 1;
    auto end = line.find(' ', start);
    return line.substr(start, end == std::string::npos ? std::string::npos : end - start);
  };
  m.seed = std::stoull(field("seed"));
  m.ratio = std::stod(field("ratio"));
  while (std::getline(in, line)) {
    if (!line.empty()) m.item_ids.push_back(line);
  }
  return m;
}

}  // namespace uttlab
