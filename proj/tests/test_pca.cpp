#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "stipbow/error.hpp"
#include "stipbow/pca.hpp"

using namespace stipbow;

namespace {

double sq_norm(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

std::vector<double> row_vec(const Matrix& m, size_t r) {
  return std::vector<double>(m.row(r), m.row(r) + m.cols);
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

// Samples confined to an affine rank-3 sheet inside R^10.
Matrix affine_sheet(size_t n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  const size_t d = 10;
  std::vector<std::vector<double>> basis(3, std::vector<double>(d));
  std::vector<double> off(d);
  for (auto& b : basis)
    for (double& x : b) x = 2.0 * oracle::unit_draw(rng) - 1.0;
  for (double& x : off) x = 4.0 * oracle::unit_draw(rng) - 2.0;
  Matrix m(n, d);
  for (size_t r = 0; r < n; ++r) {
    double c0 = 3.0 * oracle::unit_draw(rng) - 1.5;
    double c1 = 3.0 * oracle::unit_draw(rng) - 1.5;
    double c2 = 3.0 * oracle::unit_draw(rng) - 1.5;
    for (size_t j = 0; j < d; ++j)
      m.at(r, j) = off[j] + c0 * basis[0][j] + c1 * basis[1][j] +
                   c2 * basis[2][j];
  }
  return m;
}

}  // namespace

TEST_CASE("three components reconstruct a rank-3 sheet") {
  Matrix data = affine_sheet(40, 501);
  PcaModel m = pca_fit(data, 3);
  CHECK(m.n_components() == 3);
  CHECK(m.dim() == 10);
  for (size_t r = 0; r < data.rows; ++r) {
    std::vector<double> v = row_vec(data, r);
    std::vector<double> back = pca_reconstruct(m, pca_project(m, v));
    CHECK(std::sqrt(sq_norm(v, back)) < 1e-9);
  }
}

TEST_CASE("full-dimensional projection is a centered isometry") {
  Matrix data = oracle::random_matrix(40, 6, 502, -1.0, 1.0);
  PcaModel m = pca_fit(data, 6);
  Matrix proj = pca_project_all(m, data);
  for (size_t r = 0; r + 1 < data.rows; ++r) {
    double orig = sq_norm(row_vec(data, r), row_vec(data, r + 1));
    double mapped = sq_norm(row_vec(proj, r), row_vec(proj, r + 1));
    CHECK(mapped == doctest::Approx(orig).epsilon(1e-9));
  }
  for (size_t r = 0; r < data.rows; ++r) {
    std::vector<double> v = row_vec(data, r);
    std::vector<double> back = pca_reconstruct(m, pca_project(m, v));
    CHECK(std::sqrt(sq_norm(v, back)) < 1e-9);
  }
}

TEST_CASE("component rows are orthonormal on both solver paths") {
  Matrix wide = oracle::random_matrix(20, 8, 503);   // covariance path
  Matrix tall = oracle::random_matrix(10, 40, 504);  // snapshot path
  for (const Matrix* data : {&wide, &tall}) {
    PcaModel m = pca_fit(*data, 5);
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j <= i; ++j) {
        double g = dot(row_vec(m.components, i), row_vec(m.components, j));
        CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("spectrum and components match the Jacobi oracle") {
  Matrix data = oracle::random_matrix(50, 20, 505, -2.0, 2.0);
  PcaModel m = pca_fit(data, 5);
  oracle::SymEigen eig = oracle::jacobi_eigen(oracle::covariance_of(data));
  for (int i = 0; i < 5; ++i) {
    CHECK(m.explained_variance[i] ==
          doctest::Approx(eig.values[i]).epsilon(1e-7));
    double align =
        std::fabs(dot(row_vec(m.components, i), row_vec(eig.vectors, i)));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("snapshot path agrees with the direct covariance spectrum") {
  Matrix data = oracle::random_matrix(12, 30, 506, -1.0, 1.0);
  PcaModel m = pca_fit(data, 4);
  oracle::SymEigen eig = oracle::jacobi_eigen(oracle::covariance_of(data));
  for (int i = 0; i < 4; ++i) {
    CHECK(m.explained_variance[i] ==
          doctest::Approx(eig.values[i]).epsilon(1e-7));
    double align =
        std::fabs(dot(row_vec(m.components, i), row_vec(eig.vectors, i)));
    CHECK(align == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("the mean projects to the exact origin") {
  Matrix data = oracle::random_matrix(15, 7, 507);
  PcaModel m = pca_fit(data, 3);
  std::vector<double> at_mean = pca_project(m, m.mean);
  for (double v : at_mean) CHECK(v == 0.0);
  std::vector<double> back = pca_reconstruct(m, at_mean);
  for (size_t j = 0; j < m.dim(); ++j)
    CHECK(back[j] == doctest::Approx(m.mean[j]).epsilon(1e-12));
}

TEST_CASE("explained variance is positive and descending") {
  Matrix data = oracle::random_matrix(30, 12, 508, -1.0, 1.0);
  PcaModel m = pca_fit(data, 8);
  for (int i = 0; i < 8; ++i) {
    CHECK(m.explained_variance[i] > 0.0);
    if (i + 1 < 8)
      CHECK(m.explained_variance[i] >= m.explained_variance[i + 1] - 1e-12);
  }
}

TEST_CASE("reconstruction error shrinks as components are added") {
  Matrix data = oracle::random_matrix(25, 9, 509, -1.0, 1.0);
  double prev = -1.0;
  for (int k = 1; k <= 6; ++k) {
    PcaModel m = pca_fit(data, k);
    double total = 0.0;
    for (size_t r = 0; r < data.rows; ++r) {
      std::vector<double> v = row_vec(data, r);
      total += sq_norm(v, pca_reconstruct(m, pca_project(m, v)));
    }
    if (prev >= 0.0) CHECK(total <= prev + 1e-9);
    prev = total;
  }
}

TEST_CASE("a line through the origin pins the analytic eigenpair") {
  Matrix data(5, 2);
  int t = -2;
  for (size_t r = 0; r < 5; ++r, ++t) {
    data.at(r, 0) = t;
    data.at(r, 1) = 2.0 * t;
  }
  PcaModel m = pca_fit(data, 1);
  CHECK(m.mean[0] == 0.0);
  CHECK(m.mean[1] == 0.0);
  // Covariance [[2.5, 5], [5, 10]]: lambda = 12.5 along (1, 2)/sqrt(5).
  CHECK(m.explained_variance[0] == doctest::Approx(12.5).epsilon(1e-12));
  CHECK(m.components.at(0, 0) ==
        doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-12));
  CHECK(m.components.at(0, 1) ==
        doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
}

TEST_CASE("sign convention and refits are reproducible") {
  Matrix data = oracle::random_matrix(18, 11, 510, -3.0, 3.0);
  PcaModel a = pca_fit(data, 4);
  PcaModel b = pca_fit(data, 4);
  CHECK(a.components.data == b.components.data);
  CHECK(a.mean == b.mean);
  CHECK(a.explained_variance == b.explained_variance);
  for (int i = 0; i < 4; ++i) {
    double best = 0.0;
    for (size_t j = 0; j < a.dim(); ++j)
      if (std::fabs(a.components.at(i, j)) > std::fabs(best))
        best = a.components.at(i, j);
    CHECK(best > 0.0);
  }
}

TEST_CASE("batch projection matches the single-vector path bit for bit") {
  Matrix data = oracle::random_matrix(14, 8, 511);
  PcaModel m = pca_fit(data, 3);
  Matrix all = pca_project_all(m, data);
  for (size_t r = 0; r < data.rows; ++r) {
    std::vector<double> one = pca_project(m, row_vec(data, r));
    for (size_t c = 0; c < all.cols; ++c) CHECK(all.at(r, c) == one[c]);
  }
}

TEST_CASE("fit rejects degenerate shapes and deficient rank") {
  Matrix one_row(1, 4, 1.0);
  CHECK_THROWS_AS(pca_fit(one_row, 1), Error);

  Matrix data = oracle::random_matrix(5, 10, 512);
  CHECK_THROWS_AS(pca_fit(data, 0), Error);
  CHECK_THROWS_AS(pca_fit(data, 5), Error);  // exceeds samples - 1
  CHECK_NOTHROW(pca_fit(data, 4));

  Matrix flat(6, 3, 2.0);
  CHECK_THROWS_AS(pca_fit(flat, 1), Error);  // zero variance

  Matrix rank1(4, 6);
  for (size_t r = 0; r < 4; ++r)
    for (size_t c = 0; c < 6; ++c) rank1.at(r, c) = (r < 2 ? 1.0 : 3.0) * c;
  CHECK_NOTHROW(pca_fit(rank1, 1));
  CHECK_THROWS_AS(pca_fit(rank1, 2), Error);  // rank below n_components

  PcaModel m = pca_fit(data, 2);
  std::vector<double> wrong(9, 0.0);
  CHECK_THROWS_AS(pca_project(m, wrong), Error);
  CHECK_THROWS_AS(pca_reconstruct(m, wrong), Error);
}
