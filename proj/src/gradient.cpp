#include "stipbow/gradient.hpp"

#include <cmath>

#include "stipbow/error.hpp"

namespace stipbow {

namespace {

const double kPi = 4.0 * std::atan(1.0);

// One-axis difference: central in the interior, one-sided at 0 and n-1.
inline double diff_along(double prev, double next, bool at_lo, bool at_hi,
                         double self) {
  if (at_lo) return next - self;
  if (at_hi) return self - prev;
  return (next - prev) / 2.0;
}

}  // namespace

void RatioParams::validate() const {
  require(partitions >= 2, "ratio: partitions must be >= 2");
  require(d_max >= 1, "ratio: d_max must be >= 1");
  require(epsilon > 0.0, "ratio: epsilon must be positive");
}

GradientField gradient3d(const Cuboid& c) {
  require(c.side >= 3 && c.depth >= 3,
          "gradient3d: cuboid dims must be >= 3");
  GradientField g;
  g.side = c.side;
  g.depth = c.depth;
  size_t n = g.voxels();
  g.gx.resize(n);
  g.gy.resize(n);
  g.gt.resize(n);
  for (int t = 0; t < c.depth; ++t)
    for (int y = 0; y < c.side; ++y)
      for (int x = 0; x < c.side; ++x) {
        size_t i = g.idx(x, y, t);
        double self = c.at(x, y, t);
        g.gx[i] = diff_along(x > 0 ? c.at(x - 1, y, t) : 0.0,
                             x < c.side - 1 ? c.at(x + 1, y, t) : 0.0,
                             x == 0, x == c.side - 1, self);
        g.gy[i] = diff_along(y > 0 ? c.at(x, y - 1, t) : 0.0,
                             y < c.side - 1 ? c.at(x, y + 1, t) : 0.0,
                             y == 0, y == c.side - 1, self);
        g.gt[i] = diff_along(t > 0 ? c.at(x, y, t - 1) : 0.0,
                             t < c.depth - 1 ? c.at(x, y, t + 1) : 0.0,
                             t == 0, t == c.depth - 1, self);
      }
  return g;
}

std::vector<double> gradient_concat_descriptor(const Cuboid& c) {
  GradientField g = gradient3d(c);
  std::vector<double> desc;
  desc.reserve(3 * g.voxels());
  desc.insert(desc.end(), g.gx.begin(), g.gx.end());
  desc.insert(desc.end(), g.gy.begin(), g.gy.end());
  desc.insert(desc.end(), g.gt.begin(), g.gt.end());
  return desc;
}

RatioChannels ratio_channels(const GradientField& g, const RatioParams& p) {
  p.validate();
  size_t n = g.voxels();
  RatioChannels rc;
  rc.ry.assign(n, 0.0);
  rc.rt.assign(n, 0.0);
  rc.mask.assign(n, 0);
  for (size_t i = 0; i < n; ++i) {
    if (std::fabs(g.gx[i]) < p.epsilon) continue;
    rc.mask[i] = 1;
    rc.ry[i] = std::atan(g.gy[i] / g.gx[i]) / kPi + 0.5;
    rc.rt[i] = std::atan(g.gt[i] / g.gx[i]) / kPi + 0.5;
  }
  return rc;
}

int ratio_bin(double r, int partitions) {
  int b = static_cast<int>(std::floor(r * partitions));
  if (b < 0) b = 0;
  if (b >= partitions) b = partitions - 1;
  return b;
}

std::vector<double> hog_ratio_descriptor(const Cuboid& c,
                                         const RatioParams& p) {
  p.validate();
  GradientField g = gradient3d(c);
  RatioChannels rc = ratio_channels(g, p);
  std::vector<double> hist(static_cast<size_t>(p.partitions) * p.partitions,
                           0.0);
  for (size_t i = 0; i < g.voxels(); ++i) {
    if (!rc.mask[i]) continue;
    int by = ratio_bin(rc.ry[i], p.partitions);
    int bt = ratio_bin(rc.rt[i], p.partitions);
    hist[static_cast<size_t>(by) * p.partitions + bt] += g.magnitude(i);
  }
  return hist;
}

std::vector<double> cog_descriptor(const Cuboid& c, const RatioParams& p) {
  p.validate();
  GradientField g = gradient3d(c);
  RatioChannels rc = ratio_channels(g, p);
  size_t B = static_cast<size_t>(p.partitions) * p.partitions;
  std::vector<double> table(B * B * p.d_max, 0.0);

  std::vector<int> bin(g.voxels(), -1);
  for (size_t i = 0; i < g.voxels(); ++i)
    if (rc.mask[i])
      bin[i] = ratio_bin(rc.ry[i], p.partitions) * p.partitions +
               ratio_bin(rc.rt[i], p.partitions);

  for (int t = 0; t < g.depth; ++t)
    for (int y = 0; y < g.side; ++y)
      for (int x = 0; x < g.side; ++x) {
        size_t u = g.idx(x, y, t);
        if (bin[u] < 0) continue;
        double mag = g.magnitude(u);
        for (int dt = -p.d_max; dt <= p.d_max; ++dt) {
          int tt = t + dt;
          if (tt < 0 || tt >= g.depth) continue;
          for (int dy = -p.d_max; dy <= p.d_max; ++dy) {
            int yy = y + dy;
            if (yy < 0 || yy >= g.side) continue;
            for (int dx = -p.d_max; dx <= p.d_max; ++dx) {
              int xx = x + dx;
              if (xx < 0 || xx >= g.side) continue;
              int k = std::max({std::abs(dx), std::abs(dy), std::abs(dt)});
              if (k == 0) continue;
              size_t v = g.idx(xx, yy, tt);
              if (bin[v] < 0) continue;
              table[(static_cast<size_t>(bin[u]) * B + bin[v]) * p.d_max +
                    (k - 1)] += mag;
            }
          }
        }
      }
  return table;
}

}  // namespace stipbow
