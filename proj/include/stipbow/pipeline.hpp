#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stipbow/classifier.hpp"
#include "stipbow/codebook.hpp"
#include "stipbow/detector.hpp"
#include "stipbow/gradient.hpp"
#include "stipbow/metrics.hpp"
#include "stipbow/pca.hpp"
#include "stipbow/shape_context.hpp"
#include "stipbow/transform.hpp"
#include "stipbow/video.hpp"

namespace stipbow {

enum class DescriptorMethod { sc3d, psc3d, dft, dct, dwt, grad3d, hog, cog };

std::string descriptor_method_name(DescriptorMethod m);
DescriptorMethod descriptor_method_from(const std::string& name);

enum class ClassifierKind { knn, svm };

struct ExperimentConfig {
  DetectorParams detector;  // sigma 2.5, tau 1.5, n_points 100
  DescriptorMethod method = DescriptorMethod::dwt;
  ShapeContextParams sc;
  TransformParams transform = TransformParams::defaults(TransformMethod::dwt);
  RatioParams ratio;
  bool pca_enabled = false;
  int pca_components = 100;
  int codebook_k = 750;
  ClassifierKind classifier = ClassifierKind::knn;
  int knn_k = 5;
  GridSearchSpec grid = GridSearchSpec::defaults();
  int runs = 20;
  int max_frames = 300;

  void validate() const;
};

// Parses the JSON config (all keys optional, defaults above). Recognized
// layout:
// {"detector":{"sigma","tau","n_points"},
//  "descriptor":{"method","per_plane_budget","dwt_levels","dwt_taps",
//                "n_radial","n_angular","radial_spacing",
//                "partitions","d_max","epsilon"},
//  "pca":{"enabled","n_components"},
//  "codebook":{"k"},
//  "classifier":{"method","k_neighbors","folds","c_grid","gamma_grid"},
//  "runs","max_frames"}
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

// One descriptor row per interest point for any method. sc3d/psc3d build
// rows from the point cloud geometry; the rest from per-point cuboids.
Matrix describe_sequence(const VideoVolume& video, const PointCloud& cloud,
                         const ExperimentConfig& cfg);

// Detection + description for every manifest entry, in manifest order.
// Pure given (config, manifest); all per-run randomness happens later.
struct PreparedData {
  std::vector<ManifestEntry> entries;
  std::vector<Matrix> descriptors;   // aligned with entries; post-PCA
  std::vector<std::string> classes;  // sorted unique labels
};

PreparedData prepare_data(const ExperimentConfig& cfg,
                          const DatasetManifest& manifest);

struct RunResult {
  ConfusionMatrix confusion;
  double accuracy = 0.0;
};

// Seeded tail of the pipeline: codebook (seed = run_seed), BoW encoding,
// classifier training (SVM CV folds seeded with run_seed + 1), evaluation
// on the test split. PCA and descriptors come in via `data` and are fit on
// the training split only.
RunResult run_prepared(const ExperimentConfig& cfg, const PreparedData& data,
                       uint64_t run_seed);

RunResult run_experiment(const ExperimentConfig& cfg,
                         const DatasetManifest& manifest, uint64_t run_seed);

struct AverageResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample std; 0 when runs == 1
  std::vector<double> per_run;
  ConfusionMatrix mean_confusion;
};

// runs executions with run_seed = base_seed + run index; detection,
// description, and PCA are computed once and shared (they take no seed).
AverageResult average_runs(const ExperimentConfig& cfg,
                           const DatasetManifest& manifest,
                           uint64_t base_seed);

// Rewrites the split column by subject id: numeric ids <= train_max go to
// train, the rest to test. Non-numeric subjects are an error; gaps in the
// id range only produce a warning on stderr.
DatasetManifest split_by_subject(const DatasetManifest& manifest,
                                 int train_max = 16);

// Reruns average_runs once per value with only the swept field changed.
// Axes: n_cuboids, codebook_k, partitions, distances, angular_bins,
// radial_bins. Values are sorted ascending and must be distinct.
SweepResult sweep(const ExperimentConfig& cfg, const std::string& axis,
                  std::vector<double> values, const DatasetManifest& manifest,
                  uint64_t base_seed);

// Resolves relative entry paths against the manifest file's directory.
DatasetManifest load_manifest_resolved(const std::string& manifest_path);

// Synthetic two-class dataset on disk (frame directories plus
// manifest.csv): class 0 uses oscillating_blob_h, class 1 _v, with
// per-sequence noise seeds. Returns the manifest path.
std::string write_synthetic_dataset(const std::string& dir, int classes,
                                    int train_per_class, int test_per_class,
                                    int width, int height, int frames,
                                    uint64_t seed);

}  // namespace stipbow
