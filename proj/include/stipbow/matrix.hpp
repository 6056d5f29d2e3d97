#pragma once

#include <cstddef>
#include <vector>

#include "stipbow/error.hpp"

namespace stipbow {

// Dense row-major matrix of doubles; the common currency for descriptor
// sets (one row per descriptor), PCA components, and codebook centroids.
struct Matrix {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  double* row(size_t r) { return data.data() + r * cols; }
  const double* row(size_t r) const { return data.data() + r * cols; }

  void append_row(const std::vector<double>& v) {
    if (rows == 0 && cols == 0) cols = v.size();
    require(v.size() == cols, "matrix: appended row has wrong length");
    data.insert(data.end(), v.begin(), v.end());
    ++rows;
  }
};

}  // namespace stipbow
