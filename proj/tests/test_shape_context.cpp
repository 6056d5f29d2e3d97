#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "oracles.hpp"
#include "stipbow/error.hpp"
#include "stipbow/shape_context.hpp"

using namespace stipbow;

namespace {

ShapeContextParams sc_params(int radial, int angular,
                             RadialSpacing spacing = RadialSpacing::log_spaced) {
  ShapeContextParams p;
  p.n_radial = radial;
  p.n_angular = angular;
  p.spacing = spacing;
  return p;
}

double sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

}  // namespace

TEST_CASE("kernel radius is the max pairwise distance") {
  std::vector<Point2> pts2 = {{0, 0}, {3, 4}, {1, 1}};
  CHECK(kernel_radius(pts2) == 5.0);
  std::vector<Point3> pts3 = {{0, 0, 0}, {2, 3, 6}, {1, 0, 0}};
  CHECK(kernel_radius(pts3) == 7.0);

  // Brute maximum on random lattice clouds.
  for (uint64_t seed : {1u, 2u, 3u}) {
    std::vector<Point3> pts = oracle::lattice_points3(12, seed, 9);
    double best = 0.0;
    for (size_t i = 0; i < pts.size(); ++i)
      for (size_t j = 0; j < pts.size(); ++j) {
        double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y,
               dt = pts[i].t - pts[j].t;
        best = std::max(best, std::sqrt(dx * dx + dy * dy + dt * dt));
      }
    CHECK(kernel_radius(pts) == best);
  }

  CHECK_THROWS_AS(kernel_radius(std::vector<Point2>{{1, 2}}), Error);
  std::vector<Point2> same = {{2, 2}, {2, 2}, {2, 2}};
  CHECK_THROWS_AS(kernel_radius(same), Error);
}

TEST_CASE("parameter and argument validation") {
  std::vector<Point2> pts = {{0, 0}, {1, 0}};
  CHECK_THROWS_AS(shape_context_2d(pts, 0, sc_params(0, 16), 1.0), Error);
  CHECK_THROWS_AS(shape_context_2d(pts, 0, sc_params(10, 1), 1.0), Error);
  CHECK_THROWS_AS(shape_context_2d(pts, 0, sc_params(10, 16), 0.0), Error);
  CHECK_THROWS_AS(shape_context_2d(pts, 2, sc_params(10, 16), 1.0), Error);
}

TEST_CASE("log radial edges: half-radius hit lands on the lower edge bin") {
  // Edges are radius/2^(n-1-j) doubling outward; r = radius/2 sits exactly
  // on the upper edge of bin n-2 and the lower-bin rule keeps it there.
  ShapeContextParams p = sc_params(10, 16);
  std::vector<Point2> pts = {{0, 0}, {4, 0}};
  std::vector<double> h = shape_context_2d(pts, 0, p, 8.0);
  CHECK(sum(h) == 1.0);
  CHECK(h[8 * 16 + 0] == 1.0);

  // r equal to the radius falls in the outermost bin.
  h = shape_context_2d(pts, 0, p, 4.0);
  CHECK(h[9 * 16 + 0] == 1.0);

  // Beyond the radius the point is dropped.
  h = shape_context_2d(pts, 0, p, 3.0);
  CHECK(sum(h) == 0.0);
}

TEST_CASE("linear radial edges split the radius evenly") {
  ShapeContextParams p = sc_params(10, 16, RadialSpacing::linear);
  std::vector<Point2> pts = {{0, 0}, {3, 0}};
  std::vector<double> h = shape_context_2d(pts, 0, p, 10.0);
  CHECK(h[2 * 16 + 0] == 1.0);  // edge 3 is bin 2's upper edge, kept low
  pts[1] = {0, 5};               // r = 5, angle pi/2
  h = shape_context_2d(pts, 0, p, 10.0);
  CHECK(h[4 * 16 + 4] == 1.0);
}

TEST_CASE("angular bins partition [0, 2pi) with atan2 wrapping") {
  ShapeContextParams p = sc_params(1, 16);
  auto bin_of = [&](double dx, double dy) {
    std::vector<Point2> pts = {{0, 0}, {dx, dy}};
    std::vector<double> h = shape_context_2d(pts, 0, p, 100.0);
    for (size_t i = 0; i < h.size(); ++i)
      if (h[i] == 1.0) return static_cast<int>(i);
    return -1;
  };
  CHECK(bin_of(5, 0) == 0);
  CHECK(bin_of(4, 5) == 2);    // ~0.896 rad
  CHECK(bin_of(0, 5) == 4);    // exactly pi/2
  CHECK(bin_of(-5, 0) == 8);   // exactly pi
  CHECK(bin_of(1, -5) == 12);  // ~4.91 rad after wrapping
  CHECK(bin_of(5, -1) == 15);  // just under a full turn
}

TEST_CASE("histograms match the brute-force transcription exactly") {
  ShapeContextParams plog = sc_params(10, 16);
  ShapeContextParams plin = sc_params(7, 9, RadialSpacing::linear);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Point2> pts2 = oracle::lattice_points2(14, 100 + seed, 12);
    double r2 = kernel_radius(pts2);
    std::vector<Point3> pts3 = oracle::lattice_points3(11, 200 + seed, 10);
    double r3 = kernel_radius(pts3);
    for (size_t ref = 0; ref < pts2.size(); ++ref) {
      CHECK(shape_context_2d(pts2, ref, plog, r2) ==
            oracle::sc2d_brute(pts2, ref, plog, r2));
      CHECK(shape_context_2d(pts2, ref, plin, r2) ==
            oracle::sc2d_brute(pts2, ref, plin, r2));
    }
    for (size_t ref = 0; ref < pts3.size(); ++ref) {
      CHECK(shape_context_3d(pts3, ref, plog, r3) ==
            oracle::sc3d_brute(pts3, ref, plog, r3));
      CHECK(shape_context_3d(pts3, ref, plin, r3) ==
            oracle::sc3d_brute(pts3, ref, plin, r3));
    }
  }
}

TEST_CASE("bin mass equals the number of in-radius neighbors") {
  std::vector<Point2> pts = oracle::lattice_points2(18, 7, 15);
  double radius = kernel_radius(pts);
  ShapeContextParams p = sc_params(5, 8);
  for (size_t ref = 0; ref < pts.size(); ++ref) {
    // Full radius: every other point is within it by construction.
    CHECK(sum(shape_context_2d(pts, ref, p, radius)) == double(pts.size() - 1));
    size_t in = 0;
    for (size_t q = 0; q < pts.size(); ++q) {
      if (q == ref) continue;
      double dx = pts[q].x - pts[ref].x, dy = pts[q].y - pts[ref].y;
      if (std::sqrt(dx * dx + dy * dy) <= radius / 2.0) ++in;
    }
    CHECK(sum(shape_context_2d(pts, ref, p, radius / 2.0)) == double(in));
  }
}

TEST_CASE("translation and power-of-two scaling leave bins exactly fixed") {
  ShapeContextParams p = sc_params(10, 16);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<Point3> pts = oracle::lattice_points3(10, 300 + seed, 20);
    std::vector<Point3> moved = pts, scaled = pts;
    for (auto& q : moved) {
      q.x += 7.0;
      q.y -= 3.0;
      q.t += 11.0;
    }
    for (auto& q : scaled) {
      q.x *= 4.0;
      q.y *= 4.0;
      q.t *= 4.0;
    }
    Matrix base = sc3d_descriptors(pts, p);
    Matrix m = sc3d_descriptors(moved, p);
    Matrix s = sc3d_descriptors(scaled, p);
    CHECK(m.data == base.data);
    CHECK(s.data == base.data);

    std::vector<Point2> flat = project_points(pts, Plane::xy);
    if (kernel_radius(flat) > 0.0) {
      std::vector<Point2> flat_scaled = flat;
      for (auto& q : flat_scaled) {
        q.x *= 8.0;
        q.y *= 8.0;
      }
      for (size_t ref = 0; ref < flat.size(); ++ref)
        CHECK(shape_context_2d(flat, ref, p, kernel_radius(flat)) ==
              shape_context_2d(flat_scaled, ref, p,
                               kernel_radius(flat_scaled)));
    }
  }
}

TEST_CASE("3d bins: +t offsets take phi bin 0, duplicates take bin (0,0,0)") {
  ShapeContextParams p = sc_params(10, 16);
  std::vector<Point3> pts = {{0, 0, 0}, {0, 0, 5}};
  std::vector<double> h = shape_context_3d(pts, 0, p, 5.0);
  CHECK(h[(9 * 16 + 0) * 16 + 0] == 1.0);  // r = radius, phi = 0, theta = 0
  CHECK(sum(h) == 1.0);

  // Looking from the other end: phi = pi lands in the last phi bin.
  h = shape_context_3d(pts, 1, p, 5.0);
  CHECK(h[(9 * 16 + 15) * 16 + 0] == 1.0);

  std::vector<Point3> dup = {{1, 2, 3}, {1, 2, 3}, {5, 2, 3}};
  h = shape_context_3d(dup, 0, p, 4.0);
  CHECK(h[0] == 1.0);  // exact duplicate of the reference
  CHECK(sum(h) == 2.0);
}

TEST_CASE("descriptor matrices have the documented row lengths") {
  ShapeContextParams p = sc_params(10, 16);
  std::vector<Point3> pts = oracle::lattice_points3(9, 42, 8);
  Matrix sc = sc3d_descriptors(pts, p);
  CHECK(sc.rows == 9);
  CHECK(sc.cols == 2560);  // 10 * 16 * 16
  Matrix psc = projected_3dsc_descriptors(pts, p);
  CHECK(psc.rows == 9);
  CHECK(psc.cols == 480);  // 3 * 10 * 16

  double radius = kernel_radius(pts);
  for (size_t ref = 0; ref < pts.size(); ++ref) {
    std::vector<double> want = oracle::sc3d_brute(pts, ref, p, radius);
    for (size_t j = 0; j < want.size(); ++j)
      CHECK(sc.at(ref, j) == want[j]);
  }
}

TEST_CASE("projected descriptors are per-plane 2d contexts in xy,yt,xt order") {
  ShapeContextParams p = sc_params(10, 16);
  std::vector<Point3> pts = oracle::lattice_points3(8, 55, 9);
  Matrix psc = projected_3dsc_descriptors(pts, p);
  const Plane planes[3] = {Plane::xy, Plane::yt, Plane::xt};
  for (int pl = 0; pl < 3; ++pl) {
    std::vector<Point2> proj = project_points(pts, planes[pl]);
    double radius = kernel_radius(proj);
    for (size_t ref = 0; ref < pts.size(); ++ref) {
      std::vector<double> want = oracle::sc2d_brute(proj, ref, p, radius);
      for (size_t j = 0; j < want.size(); ++j)
        CHECK(psc.at(ref, pl * 160 + j) == want[j]);
    }
  }

  // A two-point cloud yields exactly one count per plane: three ones.
  std::vector<Point3> two = {{0, 0, 0}, {3, 4, 5}};
  Matrix m = projected_3dsc_descriptors(two, p);
  for (size_t i = 0; i < 2; ++i) {
    double total = 0.0;
    int nonzero = 0;
    for (size_t j = 0; j < m.cols; ++j) {
      total += m.at(i, j);
      if (m.at(i, j) != 0.0) ++nonzero;
    }
    CHECK(total == 3.0);
    CHECK(nonzero == 3);
  }
}

TEST_CASE("projection drops the right axis and keeps duplicates") {
  std::vector<Point3> pts = {{1, 2, 3}, {4, 5, 6}, {1, 2, 9}};
  std::vector<Point2> xy = project_points(pts, Plane::xy);
  CHECK(xy[1].x == 4.0);
  CHECK(xy[1].y == 5.0);
  CHECK(xy[2].x == 1.0);  // duplicate of xy[0] retained
  CHECK(xy[2].y == 2.0);
  std::vector<Point2> yt = project_points(pts, Plane::yt);
  CHECK(yt[0].x == 2.0);
  CHECK(yt[0].y == 3.0);
  std::vector<Point2> xt = project_points(pts, Plane::xt);
  CHECK(xt[2].x == 1.0);
  CHECK(xt[2].y == 9.0);

  // A cloud whose xy projection collapses cannot produce projected
  // descriptors (its plane radius would be zero).
  std::vector<Point3> tower = {{0, 0, 0}, {0, 0, 5}};
  CHECK_THROWS_AS(projected_3dsc_descriptors(tower, sc_params(10, 16)),
                  Error);
}
