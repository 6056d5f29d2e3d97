#include "stipbow/codebook.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "stipbow/error.hpp"

namespace stipbow {

uint64_t uniform_below(std::mt19937_64& rng, uint64_t m) {
  require(m > 0, "uniform_below: empty range");
  uint64_t limit = std::numeric_limits<uint64_t>::max() -
                   std::numeric_limits<uint64_t>::max() % m;
  uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % m;
}

std::vector<size_t> sample_without_replacement(size_t n, size_t k,
                                               uint64_t seed) {
  require(k <= n, "sample_without_replacement: k exceeds n");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::mt19937_64 rng(seed);
  for (size_t i = 0; i < k; ++i) {
    size_t j = i + static_cast<size_t>(uniform_below(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

namespace {

double sqdist(const double* a, const double* b, size_t dim) {
  double acc = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace

KmeansResult kmeans_fit(const Matrix& points, int k, uint64_t seed,
                        int max_iters, double tol) {
  size_t n = points.rows, dim = points.cols;
  require(k >= 1, "kmeans: k must be >= 1");
  require(n >= static_cast<size_t>(k), "kmeans: fewer points than k");
  require(max_iters >= 1, "kmeans: max_iters must be >= 1");

  KmeansResult res;
  res.codebook.seed = seed;
  Matrix& cent = res.codebook.centroids;
  cent = Matrix(k, dim);
  std::vector<size_t> init = sample_without_replacement(n, k, seed);
  for (int c = 0; c < k; ++c)
    std::copy(points.row(init[c]), points.row(init[c]) + dim, cent.row(c));

  std::vector<int> assign(n, 0);
  std::vector<double> best(n, 0.0);
  Matrix next(k, dim);
  std::vector<size_t> count(k, 0);

  for (int iter = 0; iter < max_iters; ++iter) {
    // Assignment phase; ties go to the lowest centroid index because the
    // scan replaces only on strictly smaller distance.
    for (size_t i = 0; i < n; ++i) {
      int bc = 0;
      double bd = sqdist(points.row(i), cent.row(0), dim);
      for (int c = 1; c < k; ++c) {
        double d = sqdist(points.row(i), cent.row(c), dim);
        if (d < bd) {
          bd = d;
          bc = c;
        }
      }
      assign[i] = bc;
      best[i] = bd;
    }

    // Reseed empty clusters from the globally farthest point. Donors must
    // keep at least one member or a lower-index cluster could end up empty
    // after its reseed check already ran; with an empty cluster present,
    // some cluster has >= 2 members, so an eligible donor always exists.
    std::fill(count.begin(), count.end(), size_t{0});
    for (size_t i = 0; i < n; ++i) ++count[assign[i]];
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) continue;
      size_t far = n;
      for (size_t i = 0; i < n; ++i) {
        if (count[assign[i]] <= 1) continue;
        if (far == n || best[i] > best[far]) far = i;
      }
      require(far < n, "kmeans: no reseed candidate");
      count[assign[far]]--;
      assign[far] = c;
      best[far] = 0.0;
      count[c] = 1;
    }

    res.objective_history.push_back(
        std::accumulate(best.begin(), best.end(), 0.0));

    // Update phase, accumulating in point order for determinism.
    std::fill(next.data.begin(), next.data.end(), 0.0);
    for (size_t i = 0; i < n; ++i) {
      double* dst = next.row(assign[i]);
      const double* src = points.row(i);
      for (size_t j = 0; j < dim; ++j) dst[j] += src[j];
    }
    double max_shift = 0.0;
    for (int c = 0; c < k; ++c) {
      double inv = 1.0 / double(count[c]);
      double shift = 0.0;
      for (size_t j = 0; j < dim; ++j) {
        double v = next.at(c, j) * inv;
        double d = v - cent.at(c, j);
        shift += d * d;
        cent.at(c, j) = v;
      }
      max_shift = std::max(max_shift, std::sqrt(shift));
    }
    res.iterations = iter + 1;
    if (max_shift < tol) break;
  }
  return res;
}

int assign_word(const Codebook& cb, const double* v, size_t dim) {
  require(dim == cb.centroids.cols, "assign_word: dimension mismatch");
  require(cb.centroids.rows > 0, "assign_word: empty codebook");
  int bc = 0;
  double bd = sqdist(v, cb.centroids.row(0), dim);
  for (size_t c = 1; c < cb.centroids.rows; ++c) {
    double d = sqdist(v, cb.centroids.row(c), dim);
    if (d < bd) {
      bd = d;
      bc = static_cast<int>(c);
    }
  }
  return bc;
}

int assign_word(const Codebook& cb, const std::vector<double>& v) {
  return assign_word(cb, v.data(), v.size());
}

std::vector<int> bow_encode(const Codebook& cb, const Matrix& descriptors) {
  require(descriptors.rows > 0, "bow_encode: empty descriptor list");
  std::vector<int> counts(cb.centroids.rows, 0);
  for (size_t r = 0; r < descriptors.rows; ++r)
    ++counts[assign_word(cb, descriptors.row(r), descriptors.cols)];
  return counts;
}

}  // namespace stipbow
