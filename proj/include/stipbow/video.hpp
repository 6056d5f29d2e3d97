#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stipbow {

// Grayscale spatio-temporal intensity block. Storage is x-fastest, then y,
// then t, so a single frame is a contiguous row-major image.
struct VideoVolume {
  int width = 0;
  int height = 0;
  int frames = 0;
  std::vector<double> data;  // size width*height*frames, values in [0,1]

  VideoVolume() = default;
  VideoVolume(int w, int h, int f, double fill = 0.0)
      : width(w), height(h), frames(f),
        data(static_cast<size_t>(w) * h * f, fill) {}

  size_t idx(int x, int y, int t) const {
    return (static_cast<size_t>(t) * height + y) * width + x;
  }
  double& at(int x, int y, int t) { return data[idx(x, y, t)]; }
  double at(int x, int y, int t) const { return data[idx(x, y, t)]; }
};

// Loads a volume from a directory of numbered PGM/PNG frames, a single
// image file, or a .y4m stream. Keeps at most max_frames frames (never
// pads). Color inputs become gray via (R+G+B)/3; 8-bit values map to
// [0,1] by value/255.
VideoVolume load_frame_sequence(const std::string& path, int max_frames);

// Single-image loaders used by load_frame_sequence; exposed for tests.
void load_pgm_frame(const std::string& path, int& w, int& h,
                    std::vector<double>& gray);
void load_png_frame(const std::string& path, int& w, int& h,
                    std::vector<double>& gray);

// Writes frame t of the volume as binary 8-bit PGM (P5), quantizing with
// round(v*255) clamped to [0,255].
void write_pgm(const std::string& path, const VideoVolume& v, int t);

// Writes every frame as <dir>/<prefix>NNNNNN.pgm.
void write_frame_sequence(const std::string& dir, const std::string& prefix,
                          const VideoVolume& v);

enum class SyntheticKind { uniform, oscillating_blob_h, oscillating_blob_v };

// Test substrate. "uniform" is a constant volume (exactly, no noise) so
// that downstream responses are exactly flat. The blob kinds place a
// Gaussian blob (sigma 3 px) on a dim background, center oscillating
// sinusoidally along x (resp. y) with period 16 frames and amplitude
// width/4 (resp. height/4), plus a small seeded noise floor that repeats
// with the same 16-frame period so the sequence stays exactly periodic.
VideoVolume generate_synthetic_sequence(SyntheticKind kind, int width,
                                        int height, int frames,
                                        uint64_t seed);

struct ManifestEntry {
  std::string sequence_id;
  std::string path;
  std::string label;
  std::string subject;
  std::string split;  // "train" or "test"
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

// Parses a manifest CSV with header `sequence_id,path,label,subject,split`.
// Enforces unique sequence ids, split values in {train,test}, non-empty
// fields, and subject-disjoint splits (no subject may appear in both).
DatasetManifest load_manifest(const std::string& path);

}  // namespace stipbow
