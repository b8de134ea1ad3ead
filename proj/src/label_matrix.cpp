#include "uttlab/label_matrix.hpp"

#include "uttlab/error.hpp"

namespace uttlab {

std::size_t LabelMatrix::column_sum(std::size_t j) const {
  std::size_t s = 0;
  for (std::size_t i = 0; i < rows; ++i) s += at(i, j);
  return s;
}

std::vector<std::string> LabelMatrix::row_labels(std::size_t i) const {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < cols; ++j) {
    if (at(i, j)) out.push_back(label_universe[j]);
  }
  return out;
}

bool LabelMatrix::row_empty(std::size_t i) const {
  for (std::size_t j = 0; j < cols; ++j) {
    if (at(i, j)) return false;
  }
  return true;
}

LabelMatrix label_matrix(const TaskDataset& dataset) {
  LabelMatrix m(dataset.items.size(), dataset.label_universe);
  for (std::size_t i = 0; i < dataset.items.size(); ++i) {
    for (const auto& label : dataset.items[i].labels) {
      const int j = dataset.label_index(label);
      if (j < 0) {
        throw ValidationError("item " + dataset.items[i].item_id + " carries label \"" + label +
                              "\" outside the task universe");
      }
      m.at(i, static_cast<std::size_t>(j)) = 1;
    }
  }
  return m;
}

void check_same_shape(const LabelMatrix& a, const LabelMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw ValidationError("shape mismatch: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                          " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols));
  }
  if (a.label_universe != b.label_universe) {
    throw ValidationError("shape mismatch: label universes differ");
  }
}

}  // namespace uttlab
