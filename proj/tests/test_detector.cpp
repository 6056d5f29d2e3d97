#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "stipbow/detector.hpp"
#include "stipbow/error.hpp"

using namespace stipbow;

namespace {

DetectorParams params(double sigma, double tau, int n_points = 1000000) {
  DetectorParams p;
  p.sigma = sigma;
  p.tau = tau;
  p.n_points = n_points;
  return p;
}

std::vector<InterestPoint> sorted_truncated(std::vector<InterestPoint> pts,
                                            int n_points) {
  std::sort(pts.begin(), pts.end(),
            [](const InterestPoint& a, const InterestPoint& b) {
              return std::make_tuple(-a.response, a.t, a.y, a.x) <
                     std::make_tuple(-b.response, b.t, b.y, b.x);
            });
  if (static_cast<int>(pts.size()) > n_points) pts.resize(n_points);
  return pts;
}

}  // namespace

TEST_CASE("gaussian kernel is normalized, symmetric, correctly sized") {
  for (double sigma : {0.5, 1.0, 2.5}) {
    std::vector<double> k = gaussian_kernel(sigma);
    int r = static_cast<int>(std::ceil(3.0 * sigma));
    REQUIRE(static_cast<int>(k.size()) == 2 * r + 1);
    double sum = 0.0;
    for (double v : k) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    for (int i = 0; i <= r; ++i) CHECK(k[r - i] == k[r + i]);
    for (int i = 1; i <= r; ++i) CHECK(k[r + i] < k[r + i - 1]);
  }
  CHECK_THROWS_AS(gaussian_kernel(0.0), Error);
}

TEST_CASE("gabor quadrature pair matches its closed form") {
  std::vector<double> ev, od;
  gabor_quadrature_pair(1.5, ev, od);
  REQUIRE(ev.size() == 11);  // radius ceil(4.5) = 5
  REQUIRE(od.size() == 11);
  CHECK(ev[5] == -1.0);  // center: -cos(0) * exp(0)
  CHECK(od[5] == 0.0);
  const double two_pi = 8.0 * std::atan(1.0);
  for (int t = -5; t <= 5; ++t) {
    double env = std::exp(-double(t) * t / (1.5 * 1.5));
    CHECK(ev[t + 5] ==
          doctest::Approx(-std::cos(two_pi * t * (4.0 / 1.5)) * env)
              .epsilon(1e-15));
    CHECK(od[t + 5] ==
          doctest::Approx(-std::sin(two_pi * t * (4.0 / 1.5)) * env)
              .epsilon(1e-15));
  }
}

TEST_CASE("spatial smoothing preserves constants and matches dense 2d") {
  VideoVolume flat(11, 9, 2, 0.37);
  VideoVolume s = gaussian_smooth_spatial(flat, 1.2);
  for (double v : s.data) CHECK(v == doctest::Approx(0.37).epsilon(1e-14));

  VideoVolume v = oracle::random_volume(13, 10, 3, 404);
  VideoVolume got = gaussian_smooth_spatial(v, 0.9);
  VideoVolume want = oracle::dense_gaussian2d(v, 0.9);
  for (size_t i = 0; i < got.data.size(); ++i)
    CHECK(got.data[i] == doctest::Approx(want.data[i]).epsilon(1e-12));
}

TEST_CASE("response function equals the dense triple-sum definition") {
  DetectorParams p = params(1.0, 1.0);
  for (uint64_t seed : {11u, 12u, 13u}) {
    VideoVolume v = oracle::random_volume(9, 9, 16, seed);
    Field3D lib = response_function(v, p);
    Field3D ref = oracle::dense_response(v, p);
    double worst = 0.0;
    for (size_t i = 0; i < lib.data.size(); ++i)
      worst = std::max(worst, std::fabs(lib.data[i] - ref.data[i]));
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("response rejects volumes smaller than the kernel support") {
  VideoVolume v(9, 9, 16, 0.5);
  CHECK_THROWS_AS(response_function(v, params(2.5, 1.0)), Error);
  VideoVolume shallow(32, 32, 6, 0.5);
  CHECK_THROWS_AS(response_function(shallow, params(1.0, 1.0)), Error);
  CHECK_THROWS_AS(response_function(v, params(-1.0, 1.0)), Error);
  CHECK_THROWS_AS(response_function(v, params(1.0, 0.0)), Error);
}

TEST_CASE("uniform input yields no interest points") {
  VideoVolume v = generate_synthetic_sequence(SyntheticKind::uniform, 24, 24,
                                              24, 7);
  PointCloud cloud = detect(v, params(1.0, 1.0));
  CHECK(cloud.points.empty());
  CHECK(cloud.width == 24);
  CHECK(cloud.frames == 24);
}

TEST_CASE("detected maxima equal the exhaustive strict-maximum set") {
  DetectorParams p = params(0.4, 0.4);  // halves = 1, small borders
  for (uint64_t seed : {21u, 22u, 23u, 24u}) {
    VideoVolume noise = oracle::random_volume(12, 10, 9, seed);
    Field3D R(12, 10, 9);
    R.data = noise.data;
    PointCloud got = detect_interest_points(R, p);
    std::vector<InterestPoint> want =
        sorted_truncated(oracle::strict_maxima_set(R, p), p.n_points);
    REQUIRE(got.points.size() == want.size());
    for (size_t i = 0; i < want.size(); ++i) {
      CHECK(got.points[i].x == want[i].x);
      CHECK(got.points[i].y == want[i].y);
      CHECK(got.points[i].t == want[i].t);
      CHECK(got.points[i].response == want[i].response);
    }
  }
}

TEST_CASE("equal responses order by (t, y, x) and n_points truncates") {
  Field3D R(8, 8, 8, 0.0);
  R.at(3, 3, 2) = 5.0;
  R.at(3, 3, 5) = 5.0;
  R.at(5, 2, 5) = 7.0;
  DetectorParams p = params(0.3, 0.3, 2);  // halves = 1

  PointCloud top2 = detect_interest_points(R, p);
  REQUIRE(top2.points.size() == 2);
  CHECK(top2.points[0].response == 7.0);
  CHECK(top2.points[0].x == 5);
  CHECK(top2.points[1].t == 2);  // earlier t wins the tie

  p.n_points = 10;
  PointCloud all = detect_interest_points(R, p);
  REQUIRE(all.points.size() == 3);
  CHECK(all.points[1].t == 2);
  CHECK(all.points[2].t == 5);
}

TEST_CASE("detection commutes with integer translation of a compact bump") {
  DetectorParams p = params(1.0, 1.0, 4);
  auto bump_at = [](int cx, int cy, int ct) {
    VideoVolume v(26, 26, 26, 0.0);
    for (int dt = -1; dt <= 1; ++dt)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          v.at(cx + dx, cy + dy, ct + dt) =
              1.0 / (1 + dx * dx + dy * dy + dt * dt);
    return v;
  };
  PointCloud a = detect(bump_at(9, 10, 11), p);
  PointCloud b = detect(bump_at(12, 11, 14), p);
  REQUIRE(!a.points.empty());
  REQUIRE(a.points.size() == b.points.size());
  for (size_t i = 0; i < a.points.size(); ++i) {
    CHECK(b.points[i].x - a.points[i].x == 3);
    CHECK(b.points[i].y - a.points[i].y == 1);
    CHECK(b.points[i].t - a.points[i].t == 3);
    CHECK(b.points[i].response ==
          doctest::Approx(a.points[i].response).epsilon(1e-9));
  }
}

TEST_CASE("oscillating blob detection tracks the analytic trajectory") {
  const double two_pi = 8.0 * std::atan(1.0);
  VideoVolume v = generate_synthetic_sequence(
      SyntheticKind::oscillating_blob_h, 64, 64, 48, 3);
  PointCloud cloud = detect(v, params(2.5, 1.5, 100));
  REQUIRE(!cloud.points.empty());
  const InterestPoint& top = cloud.points[0];
  bool near = false;
  for (int dt = -2; dt <= 2 && !near; ++dt) {
    int t = top.t + dt;
    if (t < 0 || t >= 48) continue;
    double cx = 32.0 + 16.0 * std::sin(two_pi * (t % 16) / 16.0);
    near = std::abs(top.x - cx) <= 2.0 && std::abs(top.y - 32.0) <= 2.0;
  }
  CHECK(near);
}

TEST_CASE("default cuboid geometry is 17x17x11 = 3179 voxels") {
  DetectorParams p;  // sigma 2.5, tau 1.5
  CHECK(p.spatial_half() == 8);
  CHECK(p.temporal_half() == 5);
  CHECK(p.cuboid_side() == 17);
  CHECK(p.cuboid_depth() == 11);
  CHECK(p.cuboid_side() * p.cuboid_side() * p.cuboid_depth() == 3179);

  VideoVolume v = oracle::random_volume(40, 40, 20, 88);
  InterestPoint pt{19, 20, 9, 1.0};
  Cuboid c = extract_cuboid(v, pt, p);
  CHECK(c.side == 17);
  CHECK(c.depth == 11);
  REQUIRE(c.values.size() == 3179);
  CHECK(c.center.x == 19);

  // Exhaustive index decode against the parent volume.
  size_t i = 0;
  for (int dt = -5; dt <= 5; ++dt)
    for (int dy = -8; dy <= 8; ++dy)
      for (int dx = -8; dx <= 8; ++dx, ++i) {
        CHECK(c.values[i] == v.at(19 + dx, 20 + dy, 9 + dt));
        CHECK(c.at(dx + 8, dy + 8, dt + 5) == c.values[i]);
      }
}

TEST_CASE("cuboid extraction rejects points whose block leaves the volume") {
  DetectorParams p;  // halves 8 and 5
  VideoVolume v(40, 40, 20, 0.1);
  CHECK_THROWS_AS(extract_cuboid(v, {7, 20, 9, 0.0}, p), Error);
  CHECK_THROWS_AS(extract_cuboid(v, {19, 32, 9, 0.0}, p), Error);
  CHECK_THROWS_AS(extract_cuboid(v, {19, 20, 4, 0.0}, p), Error);
  CHECK_THROWS_AS(extract_cuboid(v, {19, 20, 15, 0.0}, p), Error);
  CHECK_NOTHROW(extract_cuboid(v, {8, 8, 5, 0.0}, p));
}

TEST_CASE("extract_cuboids maps the whole cloud in order") {
  DetectorParams p = params(1.0, 1.0);
  VideoVolume v = oracle::random_volume(24, 24, 24, 60);
  PointCloud cloud;
  cloud.points = {{5, 6, 7, 2.0}, {10, 11, 12, 1.0}};
  std::vector<Cuboid> cs = extract_cuboids(v, cloud, p);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].center.x == 5);
  CHECK(cs[1].center.t == 12);
  CHECK(cs[0].values[0] == v.at(5 - 3, 6 - 3, 7 - 3));
}
