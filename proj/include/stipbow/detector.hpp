#pragma once

#include <cmath>
#include <vector>

#include "stipbow/video.hpp"

namespace stipbow {

// Scalar field over (x,y,t) with the same layout as VideoVolume but no
// [0,1] range restriction (filter outputs can be negative or large).
struct Field3D {
  int width = 0;
  int height = 0;
  int frames = 0;
  std::vector<double> data;

  Field3D() = default;
  Field3D(int w, int h, int f, double fill = 0.0)
      : width(w), height(h), frames(f),
        data(static_cast<size_t>(w) * h * f, fill) {}

  size_t idx(int x, int y, int t) const {
    return (static_cast<size_t>(t) * height + y) * width + x;
  }
  double& at(int x, int y, int t) { return data[idx(x, y, t)]; }
  double at(int x, int y, int t) const { return data[idx(x, y, t)]; }
};

struct DetectorParams {
  double sigma = 2.5;  // spatial scale, px
  double tau = 1.5;    // temporal scale, frames
  int n_points = 100;  // cap on returned interest points

  double omega() const { return 4.0 / tau; }
  // Cuboid half-sides; 2*round(3s)+1 gives 17x17x11 at the defaults.
  int spatial_half() const { return static_cast<int>(std::lround(3.0 * sigma)); }
  int temporal_half() const { return static_cast<int>(std::lround(3.0 * tau)); }
  int cuboid_side() const { return 2 * spatial_half() + 1; }
  int cuboid_depth() const { return 2 * temporal_half() + 1; }
  void validate() const;
};

struct InterestPoint {
  int x = 0;
  int y = 0;
  int t = 0;
  double response = 0.0;
};

struct PointCloud {
  std::vector<InterestPoint> points;  // descending response
  int width = 0, height = 0, frames = 0;  // source volume dims
};

// Raw (unsmoothed) intensity block around an interest point, stored
// x-fastest, then y, then t like the parent volume.
struct Cuboid {
  InterestPoint center;
  int side = 0;   // spatial extent (both x and y)
  int depth = 0;  // temporal extent
  std::vector<double> values;

  size_t idx(int dx, int dy, int dt) const {
    return (static_cast<size_t>(dt) * side + dy) * side + dx;
  }
  double at(int dx, int dy, int dt) const { return values[idx(dx, dy, dt)]; }
};

// Per-frame convolution with a normalized separable 2D Gaussian, kernel
// radius ceil(3*sigma), borders edge-replicated.
VideoVolume gaussian_smooth_spatial(const VideoVolume& v, double sigma);

// Normalized 1D Gaussian sampled at integer offsets in [-ceil(3s), ceil(3s)].
std::vector<double> gaussian_kernel(double sigma);

// Temporal quadrature pair, unnormalized, omega = 4/tau, sampled at integer
// t in [-ceil(3*tau), ceil(3*tau)]:
//   h_ev(t) = -cos(2*pi*t*omega) * exp(-t^2/tau^2)
//   h_od(t) = -sin(2*pi*t*omega) * exp(-t^2/tau^2)
void gabor_quadrature_pair(double tau, std::vector<double>& h_ev,
                           std::vector<double>& h_od);

// R = (I*g*h_ev)^2 + (I*g*h_od)^2 with g spatial and h temporal, all
// convolutions edge-replicated.
Field3D response_function(const VideoVolume& v, const DetectorParams& p);

// Strict 26-neighborhood local maxima of R, excluding a spatial_half /
// temporal_half border so each point admits a full cuboid. Returns the
// n_points strongest, descending; equal responses ordered by (t,y,x).
PointCloud detect_interest_points(const Field3D& R, const DetectorParams& p);

// response_function + detect_interest_points in one call.
PointCloud detect(const VideoVolume& v, const DetectorParams& p);

// Cuboid of raw intensities centered at pt; errors if the block would
// leave the volume.
Cuboid extract_cuboid(const VideoVolume& v, const InterestPoint& pt,
                      const DetectorParams& p);

std::vector<Cuboid> extract_cuboids(const VideoVolume& v,
                                    const PointCloud& cloud,
                                    const DetectorParams& p);

}  // namespace stipbow
