#include "stipbow/shape_context.hpp"

#include <cmath>

#include "stipbow/error.hpp"

namespace stipbow {

namespace {

const double kTwoPi = 8.0 * std::atan(1.0);
const double kPi = 4.0 * std::atan(1.0);

// First bin whose upper edge is >= r; exact-edge hits take the lower bin.
int radial_bin(double r, double radius, const ShapeContextParams& p) {
  for (int j = 0; j < p.n_radial - 1; ++j) {
    double edge = p.spacing == RadialSpacing::log_spaced
                      ? radius * std::exp2(double(j + 1 - p.n_radial))
                      : radius * double(j + 1) / p.n_radial;
    if (r <= edge) return j;
  }
  return p.n_radial - 1;
}

int angular_bin(double angle, double full_turn, int n) {
  int b = static_cast<int>(std::floor(n * angle / full_turn));
  if (b < 0) b = 0;
  if (b >= n) b = n - 1;
  return b;
}

// atan2 image mapped onto [0, 2pi); atan2(0,0) = 0 covers coincident points.
double azimuth(double dy, double dx) {
  double a = std::atan2(dy, dx);
  if (a < 0.0) a += kTwoPi;
  return a;
}

}  // namespace

void ShapeContextParams::validate() const {
  require(n_radial >= 1, "shape context: n_radial must be >= 1");
  require(n_angular >= 2, "shape context: n_angular must be >= 2");
}

double kernel_radius(const std::vector<Point2>& pts) {
  require(pts.size() >= 2, "kernel_radius: need at least 2 points");
  double best = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y;
      best = std::max(best, dx * dx + dy * dy);
    }
  require(best > 0.0, "kernel_radius: all points coincident");
  return std::sqrt(best);
}

double kernel_radius(const std::vector<Point3>& pts) {
  require(pts.size() >= 2, "kernel_radius: need at least 2 points");
  double best = 0.0;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j) {
      double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y,
             dt = pts[i].t - pts[j].t;
      best = std::max(best, dx * dx + dy * dy + dt * dt);
    }
  require(best > 0.0, "kernel_radius: all points coincident");
  return std::sqrt(best);
}

std::vector<double> shape_context_2d(const std::vector<Point2>& pts,
                                     size_t ref, const ShapeContextParams& p,
                                     double radius) {
  p.validate();
  require(radius > 0.0, "shape_context_2d: radius must be positive");
  require(ref < pts.size(), "shape_context_2d: reference index out of range");
  std::vector<double> bins(static_cast<size_t>(p.n_radial) * p.n_angular,
                           0.0);
  const Point2& o = pts[ref];
  for (size_t q = 0; q < pts.size(); ++q) {
    if (q == ref) continue;
    double dx = pts[q].x - o.x, dy = pts[q].y - o.y;
    double r = std::sqrt(dx * dx + dy * dy);
    if (r > radius) continue;
    int rb = radial_bin(r, radius, p);
    int ab = angular_bin(azimuth(dy, dx), kTwoPi, p.n_angular);
    bins[static_cast<size_t>(rb) * p.n_angular + ab] += 1.0;
  }
  return bins;
}

std::vector<double> shape_context_3d(const std::vector<Point3>& pts,
                                     size_t ref, const ShapeContextParams& p,
                                     double radius) {
  p.validate();
  require(radius > 0.0, "shape_context_3d: radius must be positive");
  require(ref < pts.size(), "shape_context_3d: reference index out of range");
  int A = p.n_angular;
  std::vector<double> bins(static_cast<size_t>(p.n_radial) * A * A, 0.0);
  const Point3& o = pts[ref];
  for (size_t q = 0; q < pts.size(); ++q) {
    if (q == ref) continue;
    double dx = pts[q].x - o.x, dy = pts[q].y - o.y, dt = pts[q].t - o.t;
    double r = std::sqrt(dx * dx + dy * dy + dt * dt);
    if (r > radius) continue;
    int rb, pb, tb;
    if (r == 0.0) {
      rb = pb = tb = 0;
    } else {
      rb = radial_bin(r, radius, p);
      double cosphi = dt / r;
      cosphi = std::clamp(cosphi, -1.0, 1.0);
      pb = angular_bin(std::acos(cosphi), kPi, A);
      tb = angular_bin(azimuth(dy, dx), kTwoPi, A);
    }
    bins[(static_cast<size_t>(rb) * A + pb) * A + tb] += 1.0;
  }
  return bins;
}

std::vector<Point3> cloud_points(const PointCloud& cloud) {
  std::vector<Point3> pts;
  pts.reserve(cloud.points.size());
  for (const InterestPoint& ip : cloud.points)
    pts.push_back({double(ip.x), double(ip.y), double(ip.t)});
  return pts;
}

std::vector<Point2> project_points(const std::vector<Point3>& pts,
                                   Plane plane) {
  require(!pts.empty(), "project_points: empty point set");
  std::vector<Point2> out;
  out.reserve(pts.size());
  for (const Point3& p : pts) {
    switch (plane) {
      case Plane::xy: out.push_back({p.x, p.y}); break;
      case Plane::yt: out.push_back({p.y, p.t}); break;
      case Plane::xt: out.push_back({p.x, p.t}); break;
    }
  }
  return out;
}

std::vector<Point2> project_point_cloud(const PointCloud& cloud, Plane plane) {
  require(!cloud.points.empty(), "project_point_cloud: empty cloud");
  return project_points(cloud_points(cloud), plane);
}

Matrix projected_3dsc_descriptors(const std::vector<Point3>& pts,
                                  const ShapeContextParams& p) {
  p.validate();
  require(pts.size() >= 2, "projected_3dsc: need at least 2 points");
  const Plane planes[3] = {Plane::xy, Plane::yt, Plane::xt};
  std::vector<std::vector<Point2>> proj;
  std::vector<double> radii;
  for (Plane pl : planes) {
    proj.push_back(project_points(pts, pl));
    radii.push_back(kernel_radius(proj.back()));
  }
  size_t sub = static_cast<size_t>(p.n_radial) * p.n_angular;
  Matrix out(pts.size(), 3 * sub);
  for (size_t i = 0; i < pts.size(); ++i) {
    double* row = out.row(i);
    for (int pl = 0; pl < 3; ++pl) {
      std::vector<double> h = shape_context_2d(proj[pl], i, p, radii[pl]);
      std::copy(h.begin(), h.end(), row + pl * sub);
    }
  }
  return out;
}

Matrix projected_3dsc_descriptors(const PointCloud& cloud,
                                  const ShapeContextParams& p) {
  return projected_3dsc_descriptors(cloud_points(cloud), p);
}

Matrix sc3d_descriptors(const std::vector<Point3>& pts,
                        const ShapeContextParams& p) {
  p.validate();
  require(pts.size() >= 2, "sc3d: need at least 2 points");
  double radius = kernel_radius(pts);
  size_t dim = static_cast<size_t>(p.n_radial) * p.n_angular * p.n_angular;
  Matrix out(pts.size(), dim);
  for (size_t i = 0; i < pts.size(); ++i) {
    std::vector<double> h = shape_context_3d(pts, i, p, radius);
    std::copy(h.begin(), h.end(), out.row(i));
  }
  return out;
}

Matrix sc3d_descriptors(const PointCloud& cloud, const ShapeContextParams& p) {
  return sc3d_descriptors(cloud_points(cloud), p);
}

}  // namespace stipbow
