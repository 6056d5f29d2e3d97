#pragma once

#include <cstddef>
#include <vector>

#include "stipbow/detector.hpp"
#include "stipbow/matrix.hpp"

namespace stipbow {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

enum class RadialSpacing { log_spaced, linear };

struct ShapeContextParams {
  int n_radial = 10;
  int n_angular = 16;  // 2D: theta bins; 3D: applied to phi and theta alike
  RadialSpacing spacing = RadialSpacing::log_spaced;
  void validate() const;
};

// Max pairwise Euclidean distance; errors on fewer than 2 points or an
// all-coincident set (radius 0 makes the histograms degenerate).
double kernel_radius(const std::vector<Point2>& pts);
double kernel_radius(const std::vector<Point3>& pts);

// Log-polar histogram around pts[ref]. Counts every other index (duplicates
// of the reference location included) with distance <= radius. Radial edges
// run from radius/2^n_radial to radius, doubling per bin (log spacing) or
// evenly spaced (linear); a point lands in the first bin whose upper edge
// is >= its distance, so exact-edge hits take the lower bin and r == radius
// falls in the outermost bin. Angular bin = floor(n_angular*angle/2pi) with
// atan2 mapped into [0,2pi). Flattened radial-major: bin(r,a) = r*n_angular+a.
std::vector<double> shape_context_2d(const std::vector<Point2>& pts,
                                     size_t ref, const ShapeContextParams& p,
                                     double radius);

// Spherical histogram: r = 3D distance, polar phi in [0,pi] measured from
// the +t axis (bin = floor(n_angular*phi/pi), clamped), azimuth theta as in
// 2D over the x-y plane. A zero-length offset (exact duplicate of the
// reference) counts in bin (0,0,0); at phi in {0,pi} the azimuth bin is 0
// by the atan2(0,0) = 0 convention. Flattened (r, phi, theta) row-major.
std::vector<double> shape_context_3d(const std::vector<Point3>& pts,
                                     size_t ref, const ShapeContextParams& p,
                                     double radius);

enum class Plane { xy, yt, xt };

std::vector<Point3> cloud_points(const PointCloud& cloud);

// Drops the third axis; duplicates retained. xy -> (x,y), yt -> (y,t),
// xt -> (x,t).
std::vector<Point2> project_point_cloud(const PointCloud& cloud, Plane plane);
std::vector<Point2> project_points(const std::vector<Point3>& pts,
                                   Plane plane);

// One descriptor per point: 2D shape contexts on the xy, yt, xt projections
// (radius = per-plane kernel_radius of the whole projected set),
// concatenated in that order. Row length = 3*n_radial*n_angular.
Matrix projected_3dsc_descriptors(const PointCloud& cloud,
                                  const ShapeContextParams& p);
Matrix projected_3dsc_descriptors(const std::vector<Point3>& pts,
                                  const ShapeContextParams& p);

// One flattened 3D shape context per point, radius = 3D kernel_radius.
// Row length = n_radial*n_angular^2.
Matrix sc3d_descriptors(const PointCloud& cloud, const ShapeContextParams& p);
Matrix sc3d_descriptors(const std::vector<Point3>& pts,
                        const ShapeContextParams& p);

}  // namespace stipbow
