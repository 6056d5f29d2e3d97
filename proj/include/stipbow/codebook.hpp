#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "stipbow/matrix.hpp"

namespace stipbow {

// Uniform draw from [0, m) by rejection so results do not depend on the
// standard library's distribution internals (mt19937_64 itself is fully
// specified). Shared by k-means seeding and CV fold shuffling.
uint64_t uniform_below(std::mt19937_64& rng, uint64_t m);

// Partial Fisher-Yates: the first k entries of a 0..n-1 index array after
// k swap steps, each swapping position i with i + uniform_below(n - i).
// This is the documented "draw k distinct rows" rule used for seeding.
std::vector<size_t> sample_without_replacement(size_t n, size_t k,
                                               uint64_t seed);

struct Codebook {
  Matrix centroids;  // k x dim
  uint64_t seed = 0;
  int k() const { return static_cast<int>(centroids.rows); }
};

struct KmeansResult {
  Codebook codebook;
  std::vector<double> objective_history;  // after each assignment phase
  int iterations = 0;
};

// Lloyd's algorithm. Init = k distinct data rows via
// sample_without_replacement(n, k, seed). Assignment ties go to the lowest
// centroid index; a cluster left empty is reseeded with the point farthest
// from its own centroid (lowest index on ties, skipping points whose
// cluster would be emptied by the move), processed in ascending cluster
// order. Stops when the largest centroid movement drops below tol or after
// max_iters. The recorded objective (sum of squared distances) is
// non-increasing across iterations.
KmeansResult kmeans_fit(const Matrix& points, int k, uint64_t seed,
                        int max_iters = 300, double tol = 1e-6);

// Nearest centroid by Euclidean distance, lowest index on exact ties.
int assign_word(const Codebook& cb, const double* v, size_t dim);
int assign_word(const Codebook& cb, const std::vector<double>& v);

// Word-occurrence counts over one sequence's descriptors; sums to the
// descriptor count.
std::vector<int> bow_encode(const Codebook& cb, const Matrix& descriptors);

}  // namespace stipbow
