#include "stipbow/transform.hpp"

#include <algorithm>
#include <cmath>

namespace stipbow {

namespace {

const double kPi = 4.0 * std::atan(1.0);

// Scaling (lowpass) coefficients in standard h0..h_{L-1} order; each sums
// to sqrt(2). The highpass filter is the quadrature mirror
// g[i] = (-1)^i h[L-1-i].
const std::vector<double>& daubechies_lowpass(int taps) {
  static const std::vector<double> d2 = {0.7071067811865476,
                                         0.7071067811865476};
  static const std::vector<double> d4 = {
      0.48296291314453416, 0.8365163037378079, 0.2241438680420134,
      -0.12940952255126037};
  static const std::vector<double> d6 = {
      0.33267055295008263,  0.8068915093110925,  0.45987750211849154,
      -0.13501102001025458, -0.08544127388202666, 0.03522629188570953};
  static const std::vector<double> d8 = {
      0.2303778133088965,    0.7148465705529157,  0.6308807679298589,
      -0.027983769416859854, -0.18703481171909309, 0.030841381835560764,
      0.0328830116668852,   -0.010597401785069032};
  switch (taps) {
    case 2: return d2;
    case 4: return d4;
    case 6: return d6;
    case 8: return d8;
    default: fail("dwt: unsupported Daubechies tap count (use 2/4/6/8)");
  }
}

std::vector<double> daubechies_highpass(int taps) {
  const std::vector<double>& h = daubechies_lowpass(taps);
  std::vector<double> g(h.size());
  for (size_t i = 0; i < h.size(); ++i)
    g[i] = (i % 2 == 0 ? 1.0 : -1.0) * h[h.size() - 1 - i];
  return g;
}

// Half-sample symmetric index: ...x1 x0 | x0 x1 ... xN-1 | xN-1 xN-2...
int ext_index(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// One analysis split along a strided 1D signal. Keeps the odd phase of the
// full convolution (positions 2m+1), so symmetric output length is
// floor((n + taps - 1)/2) and periodic output length is n/2.
void split1d(const double* x, int n, int stride,
             const std::vector<double>& h, const std::vector<double>& g,
             DwtExtension ext, std::vector<double>& a,
             std::vector<double>& d) {
  int taps = static_cast<int>(h.size());
  int out;
  if (ext == DwtExtension::periodic) {
    require(n % 2 == 0, "dwt periodic mode: length must be even");
    require(n >= taps, "dwt periodic mode: length shorter than the filter");
    out = n / 2;
  } else {
    out = (n + taps - 1) / 2;
  }
  a.assign(out, 0.0);
  d.assign(out, 0.0);
  for (int m = 0; m < out; ++m) {
    double sa = 0.0, sd = 0.0;
    for (int k = 0; k < taps; ++k) {
      int i = 2 * m + 1 - k;
      if (ext == DwtExtension::periodic)
        i = ((i % n) + n) % n;
      else
        i = ext_index(i, n);
      double xv = x[static_cast<size_t>(i) * stride];
      sa += h[k] * xv;
      sd += g[k] * xv;
    }
    a[m] = sa;
    d[m] = sd;
  }
}

// One 2D analysis level: returns LL, LH, HL, HH. First subband letter is
// the filter along the row index, second along the column index.
void dwt2_level(const Grid& in, const std::vector<double>& h,
                const std::vector<double>& g, DwtExtension ext, Grid& ll,
                Grid& lh, Grid& hl, Grid& hh) {
  int taps = static_cast<int>(h.size());
  int ca = ext == DwtExtension::periodic ? in.cols / 2
                                         : (in.cols + taps - 1) / 2;
  int ra = ext == DwtExtension::periodic ? in.rows / 2
                                         : (in.rows + taps - 1) / 2;
  Grid low(in.rows, ca), high(in.rows, ca);
  std::vector<double> a, d;
  for (int r = 0; r < in.rows; ++r) {
    split1d(in.v.data() + static_cast<size_t>(r) * in.cols, in.cols, 1, h, g,
            ext, a, d);
    std::copy(a.begin(), a.end(), low.v.begin() + static_cast<size_t>(r) * ca);
    std::copy(d.begin(), d.end(),
              high.v.begin() + static_cast<size_t>(r) * ca);
  }
  ll = Grid(ra, ca);
  lh = Grid(ra, ca);
  hl = Grid(ra, ca);
  hh = Grid(ra, ca);
  for (int c = 0; c < ca; ++c) {
    split1d(low.v.data() + c, in.rows, ca, h, g, ext, a, d);
    for (int r = 0; r < ra; ++r) {
      ll.at(r, c) = a[r];
      hl.at(r, c) = d[r];
    }
    split1d(high.v.data() + c, in.rows, ca, h, g, ext, a, d);
    for (int r = 0; r < ra; ++r) {
      lh.at(r, c) = a[r];
      hh.at(r, c) = d[r];
    }
  }
}

// Periodic synthesis of one axis: transpose of the analysis circulant.
std::vector<double> merge1d_periodic(const std::vector<double>& a,
                                     const std::vector<double>& d,
                                     const std::vector<double>& h,
                                     const std::vector<double>& g) {
  int half = static_cast<int>(a.size());
  int n = 2 * half;
  int taps = static_cast<int>(h.size());
  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double acc = 0.0;
    for (int m = 0; m < half; ++m) {
      int k = (((2 * m + 1 - j) % n) + n) % n;
      if (k < taps) acc += a[m] * h[k] + d[m] * g[k];
    }
    x[j] = acc;
  }
  return x;
}

Grid idwt2_level(const Grid& ll, const Grid& lh, const Grid& hl,
                 const Grid& hh, const std::vector<double>& h,
                 const std::vector<double>& g) {
  int ra = ll.rows, ca = ll.cols;
  Grid low(2 * ra, ca), high(2 * ra, ca);
  std::vector<double> a(ra), d(ra);
  for (int c = 0; c < ca; ++c) {
    for (int r = 0; r < ra; ++r) {
      a[r] = ll.at(r, c);
      d[r] = hl.at(r, c);
    }
    std::vector<double> col = merge1d_periodic(a, d, h, g);
    for (int r = 0; r < 2 * ra; ++r) low.at(r, c) = col[r];
    for (int r = 0; r < ra; ++r) {
      a[r] = lh.at(r, c);
      d[r] = hh.at(r, c);
    }
    col = merge1d_periodic(a, d, h, g);
    for (int r = 0; r < 2 * ra; ++r) high.at(r, c) = col[r];
  }
  Grid out(2 * ra, 2 * ca);
  std::vector<double> ar(ca), dr(ca);
  for (int r = 0; r < 2 * ra; ++r) {
    for (int c = 0; c < ca; ++c) {
      ar[c] = low.at(r, c);
      dr[c] = high.at(r, c);
    }
    std::vector<double> row = merge1d_periodic(ar, dr, h, g);
    std::copy(row.begin(), row.end(),
              out.v.begin() + static_cast<size_t>(r) * out.cols);
  }
  return out;
}

}  // namespace

CuboidPlanes extract_orthogonal_planes(const Cuboid& c) {
  require(c.side > 0 && c.depth > 0, "planes: empty cuboid");
  require(c.side % 2 == 1 && c.depth % 2 == 1,
          "planes: cuboid dims must be odd");
  int sc = c.side / 2, tc = c.depth / 2;
  CuboidPlanes p;
  p.xy = Grid(c.side, c.side);
  for (int y = 0; y < c.side; ++y)
    for (int x = 0; x < c.side; ++x) p.xy.at(y, x) = c.at(x, y, tc);
  p.yt = Grid(c.side, c.depth);
  for (int y = 0; y < c.side; ++y)
    for (int t = 0; t < c.depth; ++t) p.yt.at(y, t) = c.at(sc, y, t);
  p.xt = Grid(c.side, c.depth);
  for (int x = 0; x < c.side; ++x)
    for (int t = 0; t < c.depth; ++t) p.xt.at(x, t) = c.at(x, sc, t);
  return p;
}

CGrid dft2(const Grid& f) {
  require(f.rows > 0 && f.cols > 0, "dft2: empty grid");
  int M = f.rows, N = f.cols;
  std::vector<std::complex<double>> wm(M), wn(N);
  for (int j = 0; j < M; ++j) wm[j] = std::polar(1.0, -2.0 * kPi * j / M);
  for (int j = 0; j < N; ++j) wn[j] = std::polar(1.0, -2.0 * kPi * j / N);

  CGrid tmp(M, N);
  for (int r = 0; r < M; ++r)
    for (int v = 0; v < N; ++v) {
      std::complex<double> acc = 0.0;
      for (int c = 0; c < N; ++c)
        acc += f.at(r, c) * wn[(static_cast<long>(v) * c) % N];
      tmp.at(r, v) = acc;
    }
  CGrid out(M, N);
  for (int u = 0; u < M; ++u)
    for (int v = 0; v < N; ++v) {
      std::complex<double> acc = 0.0;
      for (int r = 0; r < M; ++r)
        acc += tmp.at(r, v) * wm[(static_cast<long>(u) * r) % M];
      out.at(u, v) = acc;
    }
  return out;
}

Grid dct2(const Grid& f) {
  require(f.rows > 0 && f.cols > 0, "dct2: empty grid");
  int M = f.rows, N = f.cols;
  auto alpha = [](int u, int n) {
    return u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  };
  Grid tmp(M, N);
  for (int r = 0; r < M; ++r)
    for (int v = 0; v < N; ++v) {
      double acc = 0.0;
      for (int c = 0; c < N; ++c)
        acc += f.at(r, c) * std::cos(kPi * (2.0 * c + 1.0) * v / (2.0 * N));
      tmp.at(r, v) = alpha(v, N) * acc;
    }
  Grid out(M, N);
  for (int u = 0; u < M; ++u)
    for (int v = 0; v < N; ++v) {
      double acc = 0.0;
      for (int r = 0; r < M; ++r)
        acc += tmp.at(r, v) * std::cos(kPi * (2.0 * r + 1.0) * u / (2.0 * M));
      out.at(u, v) = alpha(u, M) * acc;
    }
  return out;
}

DwtResult dwt2(const Grid& plane, int levels, int taps, DwtExtension ext) {
  require(plane.rows > 0 && plane.cols > 0, "dwt2: empty grid");
  require(levels >= 1, "dwt2: levels must be >= 1");
  require((1 << levels) <= std::min(plane.rows, plane.cols),
          "dwt2: levels exceed log2 of the smallest dimension");
  const std::vector<double>& h = daubechies_lowpass(taps);
  std::vector<double> g = daubechies_highpass(taps);

  DwtResult res;
  res.levels = levels;
  res.taps = taps;
  res.extension = ext;
  std::vector<Grid> details;  // LH, HL, HH per level, finest first
  Grid cur = plane;
  for (int l = 0; l < levels; ++l) {
    Grid ll, lh, hl, hh;
    dwt2_level(cur, h, g, ext, ll, lh, hl, hh);
    details.push_back(lh);
    details.push_back(hl);
    details.push_back(hh);
    cur = ll;
  }
  res.subbands.push_back(cur);  // LL_k
  for (int l = levels - 1; l >= 0; --l)
    for (int s = 0; s < 3; ++s) res.subbands.push_back(details[3 * l + s]);
  return res;
}

Grid idwt2(const DwtResult& d) {
  require(d.extension == DwtExtension::periodic,
          "idwt2: only periodic mode is invertible here");
  require(static_cast<int>(d.subbands.size()) == 1 + 3 * d.levels,
          "idwt2: malformed subband set");
  const std::vector<double>& h = daubechies_lowpass(d.taps);
  std::vector<double> g = daubechies_highpass(d.taps);
  Grid cur = d.subbands[0];
  for (int l = 0; l < d.levels; ++l) {
    const Grid& lh = d.subbands[1 + 3 * l];
    const Grid& hl = d.subbands[2 + 3 * l];
    const Grid& hh = d.subbands[3 + 3 * l];
    cur = idwt2_level(cur, lh, hl, hh, h, g);
  }
  return cur;
}

std::vector<std::pair<int, int>> zigzag_path(int rows, int cols) {
  std::vector<std::pair<int, int>> path;
  path.reserve(static_cast<size_t>(rows) * cols);
  for (int s = 0; s <= rows + cols - 2; ++s) {
    int rlo = std::max(0, s - cols + 1), rhi = std::min(s, rows - 1);
    if (s % 2 == 1) {
      for (int r = rlo; r <= rhi; ++r) path.emplace_back(r, s - r);
    } else {
      for (int r = rhi; r >= rlo; --r) path.emplace_back(r, s - r);
    }
  }
  return path;
}

std::vector<double> ordered_coefficients(const CGrid& dft) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(dft.rows) * dft.cols);
  for (auto [r, c] : zigzag_path(dft.rows, dft.cols))
    out.push_back(std::abs(dft.at(r, c)));
  return out;
}

std::vector<double> ordered_coefficients(const Grid& dct) {
  std::vector<double> out;
  out.reserve(static_cast<size_t>(dct.rows) * dct.cols);
  for (auto [r, c] : zigzag_path(dct.rows, dct.cols))
    out.push_back(dct.at(r, c));
  return out;
}

std::vector<double> ordered_coefficients(const DwtResult& dwt) {
  std::vector<double> out;
  for (const Grid& sb : dwt.subbands)
    out.insert(out.end(), sb.v.begin(), sb.v.end());
  return out;
}

std::vector<double> truncate_coefficients(const std::vector<double>& ordered,
                                          int budget) {
  require(budget >= 1, "truncate_coefficients: budget must be >= 1");
  require(static_cast<size_t>(budget) <= ordered.size(),
          "truncate_coefficients: budget exceeds available coefficients");
  return std::vector<double>(ordered.begin(), ordered.begin() + budget);
}

void TransformParams::validate() const {
  require(per_plane_budget >= 1, "transform: per_plane_budget must be >= 1");
  require(dwt_levels >= 1, "transform: dwt_levels must be >= 1");
  daubechies_lowpass(dwt_taps);  // rejects unsupported tap counts
}

std::vector<double> transform_descriptor(const Cuboid& c,
                                         const TransformParams& p) {
  p.validate();
  CuboidPlanes planes = extract_orthogonal_planes(c);
  std::vector<double> desc;
  desc.reserve(3 * static_cast<size_t>(p.per_plane_budget));
  for (const Grid* plane : {&planes.xy, &planes.yt, &planes.xt}) {
    std::vector<double> ordered;
    switch (p.method) {
      case TransformMethod::dft:
        ordered = ordered_coefficients(dft2(*plane));
        break;
      case TransformMethod::dct:
        ordered = ordered_coefficients(dct2(*plane));
        break;
      case TransformMethod::dwt:
        ordered = ordered_coefficients(
            dwt2(*plane, p.dwt_levels, p.dwt_taps, p.dwt_extension));
        break;
    }
    // Small planes can hold fewer coefficients than the budget; zero-pad
    // so every plane contributes exactly per_plane_budget entries.
    size_t take = std::min(ordered.size(),
                           static_cast<size_t>(p.per_plane_budget));
    desc.insert(desc.end(), ordered.begin(), ordered.begin() + take);
    desc.resize(desc.size() + (p.per_plane_budget - take), 0.0);
  }
  return desc;
}

}  // namespace stipbow
