#include "stipbow/detector.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "stipbow/error.hpp"

namespace stipbow {

void DetectorParams::validate() const {
  require(sigma > 0.0, "detector: sigma must be positive");
  require(tau > 0.0, "detector: tau must be positive");
  require(n_points > 0, "detector: n_points must be positive");
}

std::vector<double> gaussian_kernel(double sigma) {
  require(sigma > 0.0, "gaussian_kernel: sigma must be positive");
  int r = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    double v = std::exp(-(double(i) * i) / (2.0 * sigma * sigma));
    k[i + r] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

void gabor_quadrature_pair(double tau, std::vector<double>& h_ev,
                           std::vector<double>& h_od) {
  require(tau > 0.0, "gabor_quadrature_pair: tau must be positive");
  int r = static_cast<int>(std::ceil(3.0 * tau));
  double omega = 4.0 / tau;
  const double two_pi = 8.0 * std::atan(1.0);
  h_ev.assign(2 * r + 1, 0.0);
  h_od.assign(2 * r + 1, 0.0);
  for (int t = -r; t <= r; ++t) {
    double env = std::exp(-(double(t) * t) / (tau * tau));
    h_ev[t + r] = -std::cos(two_pi * t * omega) * env;
    h_od[t + r] = -std::sin(two_pi * t * omega) * env;
  }
}

namespace {

inline int clampi(int v, int lo, int hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// True convolution along x for one frame, edge-replicated:
// out(x) = sum_k k(r+k') in(x-k'). Kernel index r+k' covers k' in [-r,r].
void conv_rows(const double* in, double* out, int w, int h,
               const std::vector<double>& k) {
  int r = (static_cast<int>(k.size()) - 1) / 2;
  for (int y = 0; y < h; ++y) {
    const double* row = in + static_cast<size_t>(y) * w;
    double* orow = out + static_cast<size_t>(y) * w;
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d)
        acc += k[d + r] * row[clampi(x - d, 0, w - 1)];
      orow[x] = acc;
    }
  }
}

void conv_cols(const double* in, double* out, int w, int h,
               const std::vector<double>& k) {
  int r = (static_cast<int>(k.size()) - 1) / 2;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -r; d <= r; ++d)
        acc += k[d + r] * in[static_cast<size_t>(clampi(y - d, 0, h - 1)) * w + x];
      out[static_cast<size_t>(y) * w + x] = acc;
    }
  }
}

Field3D conv_temporal(const Field3D& in, const std::vector<double>& k) {
  int r = (static_cast<int>(k.size()) - 1) / 2;
  Field3D out(in.width, in.height, in.frames);
  size_t plane = static_cast<size_t>(in.width) * in.height;
  for (int t = 0; t < in.frames; ++t) {
    double* dst = out.data.data() + plane * t;
    for (int d = -r; d <= r; ++d) {
      const double* src =
          in.data.data() + plane * clampi(t - d, 0, in.frames - 1);
      double kv = k[d + r];
      for (size_t i = 0; i < plane; ++i) dst[i] += kv * src[i];
    }
  }
  return out;
}

}  // namespace

VideoVolume gaussian_smooth_spatial(const VideoVolume& v, double sigma) {
  std::vector<double> k = gaussian_kernel(sigma);
  VideoVolume out(v.width, v.height, v.frames);
  std::vector<double> tmp(static_cast<size_t>(v.width) * v.height);
  size_t plane = tmp.size();
  for (int t = 0; t < v.frames; ++t) {
    const double* src = v.data.data() + plane * t;
    double* dst = out.data.data() + plane * t;
    conv_rows(src, tmp.data(), v.width, v.height, k);
    conv_cols(tmp.data(), dst, v.width, v.height, k);
  }
  return out;
}

Field3D response_function(const VideoVolume& v, const DetectorParams& p) {
  p.validate();
  int gr = static_cast<int>(std::ceil(3.0 * p.sigma));
  int tr = static_cast<int>(std::ceil(3.0 * p.tau));
  require(v.width >= 2 * gr + 1 && v.height >= 2 * gr + 1,
          "response_function: volume smaller than spatial kernel support");
  require(v.frames >= 2 * tr + 1,
          "response_function: volume shorter than temporal kernel support");

  VideoVolume smooth = gaussian_smooth_spatial(v, p.sigma);
  Field3D s(v.width, v.height, v.frames);
  s.data.assign(smooth.data.begin(), smooth.data.end());

  std::vector<double> h_ev, h_od;
  gabor_quadrature_pair(p.tau, h_ev, h_od);
  Field3D even = conv_temporal(s, h_ev);
  Field3D odd = conv_temporal(s, h_od);

  Field3D r(v.width, v.height, v.frames);
  for (size_t i = 0; i < r.data.size(); ++i)
    r.data[i] = even.data[i] * even.data[i] + odd.data[i] * odd.data[i];
  return r;
}

PointCloud detect_interest_points(const Field3D& R, const DetectorParams& p) {
  p.validate();
  int sh = p.spatial_half(), th = p.temporal_half();
  PointCloud cloud;
  cloud.width = R.width;
  cloud.height = R.height;
  cloud.frames = R.frames;

  std::vector<InterestPoint> cand;
  for (int t = th; t < R.frames - th; ++t) {
    for (int y = sh; y < R.height - sh; ++y) {
      for (int x = sh; x < R.width - sh; ++x) {
        if (t < 1 || y < 1 || x < 1 || t >= R.frames - 1 ||
            y >= R.height - 1 || x >= R.width - 1)
          continue;  // 26-neighborhood must exist
        double c = R.at(x, y, t);
        bool strict_max = true;
        for (int dt = -1; dt <= 1 && strict_max; ++dt)
          for (int dy = -1; dy <= 1 && strict_max; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
              if (dx == 0 && dy == 0 && dt == 0) continue;
              if (!(c > R.at(x + dx, y + dy, t + dt))) {
                strict_max = false;
                break;
              }
            }
        if (strict_max) cand.push_back({x, y, t, c});
      }
    }
  }
  std::sort(cand.begin(), cand.end(),
            [](const InterestPoint& a, const InterestPoint& b) {
              return std::make_tuple(-a.response, a.t, a.y, a.x) <
                     std::make_tuple(-b.response, b.t, b.y, b.x);
            });
  if (static_cast<int>(cand.size()) > p.n_points) cand.resize(p.n_points);
  cloud.points = std::move(cand);
  return cloud;
}

PointCloud detect(const VideoVolume& v, const DetectorParams& p) {
  return detect_interest_points(response_function(v, p), p);
}

Cuboid extract_cuboid(const VideoVolume& v, const InterestPoint& pt,
                      const DetectorParams& p) {
  p.validate();
  int sh = p.spatial_half(), th = p.temporal_half();
  require(pt.x >= sh && pt.x < v.width - sh && pt.y >= sh &&
              pt.y < v.height - sh && pt.t >= th && pt.t < v.frames - th,
          "extract_cuboid: point too close to the volume border");
  Cuboid c;
  c.center = pt;
  c.side = p.cuboid_side();
  c.depth = p.cuboid_depth();
  c.values.resize(static_cast<size_t>(c.side) * c.side * c.depth);
  size_t i = 0;
  for (int dt = -th; dt <= th; ++dt)
    for (int dy = -sh; dy <= sh; ++dy)
      for (int dx = -sh; dx <= sh; ++dx)
        c.values[i++] = v.at(pt.x + dx, pt.y + dy, pt.t + dt);
  return c;
}

std::vector<Cuboid> extract_cuboids(const VideoVolume& v,
                                    const PointCloud& cloud,
                                    const DetectorParams& p) {
  std::vector<Cuboid> out;
  out.reserve(cloud.points.size());
  for (const InterestPoint& pt : cloud.points)
    out.push_back(extract_cuboid(v, pt, p));
  return out;
}

}  // namespace stipbow
