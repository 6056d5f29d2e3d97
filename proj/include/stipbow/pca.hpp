#pragma once

#include <vector>

#include "stipbow/matrix.hpp"

namespace stipbow {

struct PcaModel {
  std::vector<double> mean;          // input dim
  Matrix components;                 // n_components x dim, rows orthonormal
  std::vector<double> explained_variance;  // descending; not serialized

  int n_components() const { return static_cast<int>(components.rows); }
  size_t dim() const { return components.cols; }
};

// Mean-centered covariance eigenvectors for the top n_components
// eigenvalues, descending. Uses the d x d covariance when d <= samples and
// the Gram (snapshot) matrix otherwise; both give identical subspaces.
// Each component's largest-magnitude entry is made positive so refits are
// reproducible. Errors when the centered data has rank < n_components.
// Fit on training descriptors only; projection leaks nothing.
PcaModel pca_fit(const Matrix& samples, int n_components);

std::vector<double> pca_project(const PcaModel& m,
                                const std::vector<double>& v);
Matrix pca_project_all(const PcaModel& m, const Matrix& samples);

// mean + components^T * projected; used by reconstruction-error checks.
std::vector<double> pca_reconstruct(const PcaModel& m,
                                    const std::vector<double>& projected);

}  // namespace stipbow
