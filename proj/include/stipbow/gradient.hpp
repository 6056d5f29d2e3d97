#pragma once

#include <vector>

#include "stipbow/detector.hpp"

namespace stipbow {

// Per-voxel brightness gradient of a cuboid; grids share the cuboid's
// layout (x fastest, then y, then t).
struct GradientField {
  int side = 0;
  int depth = 0;
  std::vector<double> gx, gy, gt;

  size_t idx(int x, int y, int t) const {
    return (static_cast<size_t>(t) * side + y) * side + x;
  }
  double magnitude(size_t i) const {
    return std::sqrt(gx[i] * gx[i] + gy[i] * gy[i] + gt[i] * gt[i]);
  }
  size_t voxels() const {
    return static_cast<size_t>(side) * side * depth;
  }
};

// Central differences (f[i+1]-f[i-1])/2 in the interior, one-sided at the
// faces, independently per axis. Needs every cuboid dim >= 3.
GradientField gradient3d(const Cuboid& c);

// [flatten(gx); flatten(gy); flatten(gt)] in voxel order; length 3*voxels.
std::vector<double> gradient_concat_descriptor(const Cuboid& c);

struct RatioParams {
  int partitions = 10;    // bins per ratio axis
  int d_max = 3;          // max Chebyshev shell for the correlogram
  double epsilon = 1e-6;  // |gx| below this masks the voxel out
  void validate() const;
};

// Ratio channels ry = (gy/gx)', rt = (gt/gx)' with r' = atan(r)/pi + 1/2,
// masked where |gx| < epsilon. Masked entries hold 0 and are excluded from
// all downstream histograms.
struct RatioChannels {
  std::vector<double> ry, rt;
  std::vector<char> mask;  // 1 = usable voxel
};

RatioChannels ratio_channels(const GradientField& g, const RatioParams& p);

// Uniform bin over [0,1] with the upper edge folded into the last bin.
int ratio_bin(double r, int partitions);

// 2D magnitude-weighted histogram over (ry-bin, rt-bin), flattened
// ry-major; length partitions^2. All-masked cuboids give a zero vector.
std::vector<double> hog_ratio_descriptor(const Cuboid& c,
                                         const RatioParams& p);

// Correlogram over combined ratio bins: with B = partitions^2 and
// bin(v) = ry_bin*partitions + rt_bin, entry (i,j,k) sums magnitude(u)
// over ordered unmasked voxel pairs (u,v), bin(u)=i, bin(v)=j, Chebyshev
// distance exactly k in {1..d_max}. Flattened (i, j, k) row-major;
// length B^2 * d_max. Voxels are visited in storage order so repeated
// runs accumulate identically.
std::vector<double> cog_descriptor(const Cuboid& c, const RatioParams& p);

}  // namespace stipbow
