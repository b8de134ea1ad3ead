#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "uttlab/corpus.hpp"

namespace uttlab {

/// N x L binary matrix over an ordered label universe. Row-major.
struct LabelMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> data;
  std::vector<std::string> label_universe;

  LabelMatrix() = default;
  LabelMatrix(std::size_t n_rows, std::vector<std::string> universe)
      : rows(n_rows), cols(universe.size()), data(n_rows * universe.size(), 0),
        label_universe(std::move(universe)) {}

  std::uint8_t at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::uint8_t& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  const std::uint8_t* row(std::size_t i) const { return data.data() + i * cols; }

  std::size_t column_sum(std::size_t j) const;
  /// Labels set in row i, in universe order.
  std::vector<std::string> row_labels(std::size_t i) const;
  bool row_empty(std::size_t i) const;

  bool operator==(const LabelMatrix&) const = default;
};

/// Truth matrix of a dataset over its own label universe.
LabelMatrix label_matrix(const TaskDataset& dataset);

/// Throws ValidationError unless both matrices share shape and universe.
void check_same_shape(const LabelMatrix& a, const LabelMatrix& b);

}  // namespace uttlab
