#pragma once

#include <complex>
#include <vector>

#include "stipbow/detector.hpp"
#include "stipbow/error.hpp"

namespace stipbow {

// Small dense 2D grid (row-major). Rows/cols are the first/second index of
// whatever plane is stored; transforms treat them symmetrically.
struct Grid {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Grid() = default;
  Grid(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}
  double& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  double at(int r, int c) const {
    return v[static_cast<size_t>(r) * cols + c];
  }
};

struct CGrid {
  int rows = 0;
  int cols = 0;
  std::vector<std::complex<double>> v;

  CGrid() = default;
  CGrid(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c) {}
  std::complex<double>& at(int r, int c) {
    return v[static_cast<size_t>(r) * cols + c];
  }
  const std::complex<double>& at(int r, int c) const {
    return v[static_cast<size_t>(r) * cols + c];
  }
};

// The three center slices of a cuboid. Indexing convention:
//   xy.at(y, x) = cuboid(x, y, t_center)    (side x side)
//   yt.at(y, t) = cuboid(x_center, y, t)    (side x depth)
//   xt.at(x, t) = cuboid(x, y_center, t)    (side x depth)
struct CuboidPlanes {
  Grid xy, yt, xt;
};

CuboidPlanes extract_orthogonal_planes(const Cuboid& c);

// Unnormalized forward 2D DFT (separable; the inverse would carry 1/(MN)):
//   F(u,v) = sum_{r,c} f(r,c) exp(-2*pi*i*(u*r/M + v*c/N))
CGrid dft2(const Grid& plane);

// Orthonormal 2D DCT-II:
//   C(u,v) = a_M(u) a_N(v) sum f(r,c) cos[pi(2r+1)u/(2M)] cos[pi(2c+1)v/(2N)]
// with a_M(0) = sqrt(1/M), a_M(u>0) = sqrt(2/M).
Grid dct2(const Grid& plane);

enum class DwtExtension {
  symmetric,  // half-sample mirror; works for any length
  periodic    // circular; every level length must be even; exact inverse
};

// Multilevel separable Mallat decomposition with Daubechies analysis
// filters (taps in {2,4,6,8}; 4 = D4 default). Subband order in
// `subbands`: LL_k, then per level from coarsest (k) to finest (1):
// LH, HL, HH, where the first letter is the filter applied along the row
// index and the second along the column index. Symmetric extension keeps
// floor((n + taps - 1)/2) coefficients per axis (odd phase of the full
// convolution); periodic keeps n/2.
struct DwtResult {
  int levels = 0;
  int taps = 4;
  DwtExtension extension = DwtExtension::symmetric;
  std::vector<Grid> subbands;  // size 1 + 3*levels
};

DwtResult dwt2(const Grid& plane, int levels, int taps, DwtExtension ext);

// Inverse of dwt2 in periodic mode only (symmetric-mode synthesis is not
// needed by the descriptor path).
Grid idwt2(const DwtResult& d);

// Anti-diagonal (zigzag) visiting order starting at (0,0): within each
// anti-diagonal s = r+c, odd s runs r ascending, even s descending.
std::vector<std::pair<int, int>> zigzag_path(int rows, int cols);

// Coefficient orderings feeding truncation: DFT magnitudes in zigzag
// order, DCT signed values in zigzag order, DWT subband-major
// (row-major within each subband).
std::vector<double> ordered_coefficients(const CGrid& dft);
std::vector<double> ordered_coefficients(const Grid& dct);
std::vector<double> ordered_coefficients(const DwtResult& dwt);

// First `budget` ordered coefficients; errors when budget exceeds the
// available count.
std::vector<double> truncate_coefficients(const std::vector<double>& ordered,
                                          int budget);

enum class TransformMethod { dft, dct, dwt };

struct TransformParams {
  TransformMethod method = TransformMethod::dct;
  int per_plane_budget = 192;  // dft/dct default; dwt default is 96
  int dwt_levels = 2;
  int dwt_taps = 4;
  DwtExtension dwt_extension = DwtExtension::symmetric;

  static TransformParams defaults(TransformMethod m) {
    TransformParams p;
    p.method = m;
    p.per_plane_budget = (m == TransformMethod::dwt) ? 96 : 192;
    return p;
  }
  void validate() const;
};

// Per plane in (xy, yt, xt) order: transform, keep the first
// per_plane_budget ordered coefficients, concatenate. Planes with fewer
// coefficients than the budget are zero-padded up to it so the descriptor
// length is always exactly 3*per_plane_budget.
std::vector<double> transform_descriptor(const Cuboid& c,
                                         const TransformParams& p);

}  // namespace stipbow
