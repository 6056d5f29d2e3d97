#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stipbow/matrix.hpp"

namespace stipbow {

// 0.5 * sum (p_i - q_i)^2 / (p_i + q_i), skipping bins where p_i + q_i = 0.
// Symmetric, non-negative, zero exactly on equal histograms.
double chi2_distance(const std::vector<double>& p,
                     const std::vector<double>& q);
double chi2_distance(const double* p, const double* q, size_t dim);

struct KnnModel {
  Matrix train;                     // one histogram per row
  std::vector<std::string> labels;  // row-aligned
  int k_neighbors = 5;
};

// Majority vote over the min(k, train size) chi^2-nearest rows. Distance
// ties prefer the lower training index; vote ties prefer the class with
// the smaller summed chi^2 over its voting neighbors, then the
// lexicographically smaller label.
std::string knn_predict(const KnnModel& m, const std::vector<double>& h);
std::string knn_predict(const KnnModel& m, const double* h, size_t dim);

double rbf_kernel(const double* a, const double* b, size_t dim, double gamma);

struct BinarySvm {
  Matrix support_vectors;
  std::vector<double> coef;  // alpha_i * y_i per support vector
  double b = 0.0;
  double C = 1.0;
  double gamma = 1.0;
};

// Minimizes the dual 0.5 a^T Q a - e^T a (Q_ij = y_i y_j K_ij) subject to
// 0 <= a <= C, y^T a = 0 by SMO with maximal-violating-pair selection,
// stopping when the KKT violation gap drops below tol. Updates that hit
// the box land exactly on 0 or C, so bound membership is an exact test.
// b is the mean of (y_i - f0(x_i)) over free support vectors, or the gap
// midpoint when none are free.
BinarySvm svm_train_binary(const Matrix& X, const std::vector<int>& y,
                           double C, double gamma, double tol = 1e-3);

// f(x) = sum_i coef_i K(sv_i, x) + b; the predicted label is its sign.
double svm_decision(const BinarySvm& m, const double* x, size_t dim);
double svm_decision(const BinarySvm& m, const std::vector<double>& x);

struct GridSearchSpec {
  std::vector<double> c_grid;      // default 2^-5, 2^-3, ..., 2^15
  std::vector<double> gamma_grid;  // default 2^-15, 2^-13, ..., 2^3
  int folds = 5;

  static GridSearchSpec defaults();
  void validate() const;
};

struct SvmPair {
  int a = 0;  // class index mapped to +1
  int b = 0;  // class index mapped to -1
  BinarySvm svm;
};

struct SvmModel {
  std::vector<std::string> classes;  // sorted
  std::vector<SvmPair> pairs;        // all (a < b) pairs
  double C = 1.0;
  double gamma = 1.0;
  double cv_accuracy = 0.0;
};

// Seed-deterministic stratified fold ids: per class (in sorted order) the
// sample indices are shuffled and dealt round-robin across folds.
std::vector<int> stratified_folds(const std::vector<std::string>& labels,
                                  int folds, uint64_t seed);

// Full grid search by stratified CV; the best (C, gamma) by mean accuracy
// (ties: smaller C, then smaller gamma) is retrained one-vs-one on all
// data. Prediction is majority vote over pairs; vote ties go to the class
// with the greatest summed signed decision value, then the lower class
// index.
SvmModel svm_train_multiclass(const Matrix& X,
                              const std::vector<std::string>& labels,
                              const GridSearchSpec& spec, uint64_t seed);

std::string svm_predict(const SvmModel& m, const double* x, size_t dim);
std::string svm_predict(const SvmModel& m, const std::vector<double>& x);

}  // namespace stipbow
