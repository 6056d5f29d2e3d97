#include "stipbow/video.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "stipbow/error.hpp"

namespace fs = std::filesystem;

namespace stipbow {

namespace {

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return e;
}

// Filename comparison that orders digit runs numerically so frame_9 sorts
// before frame_10 regardless of zero padding.
bool natural_less(const std::string& a, const std::string& b) {
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) &&
        std::isdigit(static_cast<unsigned char>(b[j]))) {
      size_t ia = i, jb = j;
      while (ia < a.size() && std::isdigit(static_cast<unsigned char>(a[ia])))
        ++ia;
      while (jb < b.size() && std::isdigit(static_cast<unsigned char>(b[jb])))
        ++jb;
      std::string_view da(a.data() + i, ia - i), db(b.data() + j, jb - j);
      std::string_view ta = da.substr(da.find_first_not_of('0') ==
                                              std::string_view::npos
                                          ? da.size() - 1
                                          : da.find_first_not_of('0'));
      std::string_view tb = db.substr(db.find_first_not_of('0') ==
                                              std::string_view::npos
                                          ? db.size() - 1
                                          : db.find_first_not_of('0'));
      if (ta.size() != tb.size()) return ta.size() < tb.size();
      if (ta != tb) return ta < tb;
      if (da.size() != db.size()) return da.size() < db.size();
      i = ia;
      j = jb;
    } else {
      if (a[i] != b[j]) return a[i] < b[j];
      ++i;
      ++j;
    }
  }
  return a.size() < b.size();
}

int read_pnm_token(std::istream& in) {
  // Skips whitespace and '#' comment lines between header tokens.
  for (;;) {
    int c = in.peek();
    if (c == EOF) fail("pgm: truncated header");
    if (std::isspace(c)) {
      in.get();
    } else if (c == '#') {
      std::string junk;
      std::getline(in, junk);
    } else {
      break;
    }
  }
  int value = 0;
  if (!(in >> value)) fail("pgm: bad header token");
  return value;
}

void load_y4m(const std::string& path, int max_frames, VideoVolume& out) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open y4m file: " + path);
  std::string header;
  std::getline(in, header);
  require(header.rfind("YUV4MPEG2", 0) == 0, "y4m: bad stream header");

  int w = 0, h = 0;
  std::string colorspace = "420";
  std::istringstream hs(header.substr(9));
  std::string tok;
  while (hs >> tok) {
    if (tok.size() < 2) continue;
    switch (tok[0]) {
      case 'W': w = std::stoi(tok.substr(1)); break;
      case 'H': h = std::stoi(tok.substr(1)); break;
      case 'C': colorspace = tok.substr(1); break;
      default: break;  // frame rate / interlace / aspect are irrelevant here
    }
  }
  require(w > 0 && h > 0, "y4m: missing dimensions");

  size_t luma = static_cast<size_t>(w) * h;
  size_t chroma = 0;
  if (colorspace.rfind("420", 0) == 0)
    chroma = 2 * ((w / 2) * static_cast<size_t>(h / 2));
  else if (colorspace.rfind("422", 0) == 0)
    chroma = 2 * ((w / 2) * static_cast<size_t>(h));
  else if (colorspace.rfind("444", 0) == 0)
    chroma = 2 * luma;
  else if (colorspace.rfind("mono", 0) == 0)
    chroma = 0;
  else
    fail("y4m: unsupported colorspace C" + colorspace);

  std::vector<unsigned char> buf(luma);
  std::vector<std::vector<double>> frames;
  std::string frame_line;
  while (static_cast<int>(frames.size()) < max_frames &&
         std::getline(in, frame_line)) {
    require(frame_line.rfind("FRAME", 0) == 0, "y4m: bad frame marker");
    in.read(reinterpret_cast<char*>(buf.data()), luma);
    require(static_cast<size_t>(in.gcount()) == luma, "y4m: truncated frame");
    in.ignore(static_cast<std::streamsize>(chroma));
    std::vector<double> gray(luma);
    for (size_t i = 0; i < luma; ++i) gray[i] = buf[i] / 255.0;
    frames.push_back(std::move(gray));
  }
  require(!frames.empty(), "y4m: no frames in " + path);

  out = VideoVolume(w, h, static_cast<int>(frames.size()));
  for (size_t t = 0; t < frames.size(); ++t)
    std::copy(frames[t].begin(), frames[t].end(),
              out.data.begin() + static_cast<size_t>(t) * luma);
}

struct PngCloser {
  png_structp png = nullptr;
  png_infop info = nullptr;
  FILE* fp = nullptr;
  ~PngCloser() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    if (fp) std::fclose(fp);
  }
};

}  // namespace

void load_pgm_frame(const std::string& path, int& w, int& h,
                    std::vector<double>& gray) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open pgm file: " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  require(m0 == 'P' && m1 == '5', "pgm: only binary P5 supported: " + path);
  w = read_pnm_token(in);
  h = read_pnm_token(in);
  int maxval = read_pnm_token(in);
  require(w > 0 && h > 0, "pgm: bad dimensions in " + path);
  require(maxval > 0 && maxval < 65536, "pgm: bad maxval in " + path);
  in.get();  // single whitespace byte before raster

  size_t n = static_cast<size_t>(w) * h;
  gray.resize(n);
  if (maxval < 256) {
    std::vector<unsigned char> buf(n);
    in.read(reinterpret_cast<char*>(buf.data()), n);
    require(static_cast<size_t>(in.gcount()) == n, "pgm: truncated raster");
    for (size_t i = 0; i < n; ++i) gray[i] = buf[i] / double(maxval);
  } else {
    std::vector<unsigned char> buf(2 * n);
    in.read(reinterpret_cast<char*>(buf.data()), 2 * n);
    require(static_cast<size_t>(in.gcount()) == 2 * n, "pgm: truncated raster");
    for (size_t i = 0; i < n; ++i) {
      int v = (buf[2 * i] << 8) | buf[2 * i + 1];  // big-endian per PNM spec
      gray[i] = v / double(maxval);
    }
  }
}

void load_png_frame(const std::string& path, int& w, int& h,
                    std::vector<double>& gray) {
  PngCloser c;
  c.fp = std::fopen(path.c_str(), "rb");
  require(c.fp != nullptr, "cannot open png file: " + path);
  unsigned char sig[8];
  require(std::fread(sig, 1, 8, c.fp) == 8 && !png_sig_cmp(sig, 0, 8),
          "png: bad signature in " + path);

  c.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                 nullptr);
  require(c.png != nullptr, "png: init failed");
  c.info = png_create_info_struct(c.png);
  require(c.info != nullptr, "png: init failed");
  if (setjmp(png_jmpbuf(c.png))) fail("png: decode error in " + path);

  png_init_io(c.png, c.fp);
  png_set_sig_bytes(c.png, 8);
  png_read_info(c.png, c.info);

  // Normalize everything to 8-bit RGB so one gray rule covers all inputs.
  png_byte color = png_get_color_type(c.png, c.info);
  png_byte depth = png_get_bit_depth(c.png, c.info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(c.png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
    png_set_expand_gray_1_2_4_to_8(c.png);
  if (png_get_valid(c.png, c.info, PNG_INFO_tRNS))
    png_set_tRNS_to_alpha(c.png);
  if (depth == 16) png_set_strip_16(c.png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(c.png);
  png_set_strip_alpha(c.png);
  png_read_update_info(c.png, c.info);

  w = static_cast<int>(png_get_image_width(c.png, c.info));
  h = static_cast<int>(png_get_image_height(c.png, c.info));
  size_t rowbytes = png_get_rowbytes(c.png, c.info);
  require(rowbytes == static_cast<size_t>(w) * 3, "png: unexpected row size");

  std::vector<unsigned char> pixels(rowbytes * h);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + rowbytes * y;
  png_read_image(c.png, rows.data());
  png_read_end(c.png, nullptr);

  gray.resize(static_cast<size_t>(w) * h);
  for (size_t i = 0; i < gray.size(); ++i) {
    const unsigned char* p = pixels.data() + 3 * i;
    gray[i] = (p[0] + p[1] + p[2]) / (3.0 * 255.0);
  }
}

VideoVolume load_frame_sequence(const std::string& path, int max_frames) {
  require(max_frames > 0, "max_frames must be positive");
  fs::path p(path);
  require(fs::exists(p), "path does not exist: " + path);

  VideoVolume out;
  if (fs::is_regular_file(p) && lower_ext(p) == ".y4m") {
    load_y4m(path, max_frames, out);
    return out;
  }

  std::vector<std::string> files;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (!e.is_regular_file()) continue;
      std::string ext = lower_ext(e.path());
      if (ext == ".pgm" || ext == ".png") files.push_back(e.path().string());
    }
    std::sort(files.begin(), files.end(),
              [](const std::string& a, const std::string& b) {
                return natural_less(fs::path(a).filename().string(),
                                    fs::path(b).filename().string());
              });
  } else {
    files.push_back(path);
  }
  require(!files.empty(), "no frames found under " + path);
  if (static_cast<int>(files.size()) > max_frames) files.resize(max_frames);

  for (size_t t = 0; t < files.size(); ++t) {
    int w = 0, h = 0;
    std::vector<double> gray;
    std::string ext = lower_ext(fs::path(files[t]));
    if (ext == ".pgm")
      load_pgm_frame(files[t], w, h, gray);
    else if (ext == ".png")
      load_png_frame(files[t], w, h, gray);
    else
      fail("unsupported frame format: " + files[t]);
    if (t == 0) {
      out = VideoVolume(w, h, static_cast<int>(files.size()));
    } else {
      require(w == out.width && h == out.height,
              "inconsistent frame dimensions at " + files[t]);
    }
    std::copy(gray.begin(), gray.end(),
              out.data.begin() + t * gray.size());
  }
  return out;
}

void write_pgm(const std::string& path, const VideoVolume& v, int t) {
  require(t >= 0 && t < v.frames, "frame index out of range");
  std::ofstream outf(path, std::ios::binary);
  require(outf.good(), "cannot write pgm file: " + path);
  outf << "P5\n" << v.width << " " << v.height << "\n255\n";
  std::vector<unsigned char> row(v.width);
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      long q = std::lround(v.at(x, y, t) * 255.0);
      row[x] = static_cast<unsigned char>(std::clamp(q, 0L, 255L));
    }
    outf.write(reinterpret_cast<const char*>(row.data()), v.width);
  }
  require(outf.good(), "write failed: " + path);
}

void write_frame_sequence(const std::string& dir, const std::string& prefix,
                          const VideoVolume& v) {
  fs::create_directories(dir);
  for (int t = 0; t < v.frames; ++t) {
    char name[32];
    std::snprintf(name, sizeof(name), "%06d.pgm", t);
    write_pgm((fs::path(dir) / (prefix + name)).string(), v, t);
  }
}

VideoVolume generate_synthetic_sequence(SyntheticKind kind, int width,
                                        int height, int frames,
                                        uint64_t seed) {
  require(width > 0 && height > 0 && frames > 0, "dims must be positive");
  if (kind == SyntheticKind::uniform) {
    return VideoVolume(width, height, frames, 0.5);
  }
  require(width >= 32 && height >= 32 && frames >= 32,
          "blob kinds need dims of at least 32x32x32");

  constexpr double kSigma = 3.0;
  constexpr double kBackground = 0.2;
  constexpr double kAmplitude = 0.7;
  constexpr double kNoise = 0.02;
  constexpr int kPeriod = 16;
  const double two_pi = 8.0 * std::atan(1.0);

  // Noise is drawn once for a single period and tiled, so frames t and
  // t+16 are bit-identical (the blob path itself has period 16).
  std::mt19937_64 rng(seed);
  size_t plane = static_cast<size_t>(width) * height;
  std::vector<double> noise(plane * kPeriod);
  for (double& n : noise)
    n = kNoise * ((rng() >> 11) * 0x1.0p-53);

  VideoVolume v(width, height, frames);
  for (int t = 0; t < frames; ++t) {
    double s = std::sin(two_pi * (t % kPeriod) / kPeriod);
    double cx = width / 2.0, cy = height / 2.0;
    if (kind == SyntheticKind::oscillating_blob_h)
      cx += (width / 4.0) * s;
    else
      cy += (height / 4.0) * s;
    const double* nf = noise.data() + plane * (t % kPeriod);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        double dx = x - cx, dy = y - cy;
        double g = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
        double val = kBackground + kAmplitude * g + nf[y * width + x];
        v.at(x, y, t) = std::clamp(val, 0.0, 1.0);
      }
    }
  }
  return v;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

DatasetManifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open manifest: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "manifest is empty");
  {
    auto hdr = split_csv_line(line);
    std::vector<std::string> want = {"sequence_id", "path", "label",
                                     "subject", "split"};
    require(hdr == want,
            "manifest header must be sequence_id,path,label,subject,split");
  }

  DatasetManifest m;
  std::set<std::string> ids;
  std::map<std::string, std::string> subject_split;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    require(f.size() == 5,
            "manifest line " + std::to_string(lineno) + ": expected 5 fields");
    ManifestEntry e{f[0], f[1], f[2], f[3], f[4]};
    for (const std::string* s :
         {&e.sequence_id, &e.path, &e.label, &e.subject, &e.split})
      require(!s->empty(),
              "manifest line " + std::to_string(lineno) + ": empty field");
    require(e.split == "train" || e.split == "test",
            "manifest line " + std::to_string(lineno) +
                ": split must be train or test, got '" + e.split + "'");
    require(ids.insert(e.sequence_id).second,
            "manifest: duplicate sequence_id '" + e.sequence_id + "'");
    auto [it, fresh] = subject_split.emplace(e.subject, e.split);
    require(fresh || it->second == e.split,
            "manifest: subject '" + e.subject +
                "' appears in both train and test splits");
    m.entries.push_back(std::move(e));
  }
  require(!m.entries.empty(), "manifest has no entries");
  return m;
}

}  // namespace stipbow
