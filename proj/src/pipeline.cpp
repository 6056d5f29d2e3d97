#include "stipbow/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include <nlohmann/json.hpp>

#include "stipbow/error.hpp"

namespace fs = std::filesystem;

namespace stipbow {

std::string descriptor_method_name(DescriptorMethod m) {
  switch (m) {
    case DescriptorMethod::sc3d: return "sc3d";
    case DescriptorMethod::psc3d: return "psc3d";
    case DescriptorMethod::dft: return "dft";
    case DescriptorMethod::dct: return "dct";
    case DescriptorMethod::dwt: return "dwt";
    case DescriptorMethod::grad3d: return "grad3d";
    case DescriptorMethod::hog: return "hog";
    case DescriptorMethod::cog: return "cog";
  }
  fail("unreachable descriptor method");
}

DescriptorMethod descriptor_method_from(const std::string& name) {
  if (name == "sc3d") return DescriptorMethod::sc3d;
  if (name == "psc3d") return DescriptorMethod::psc3d;
  if (name == "dft") return DescriptorMethod::dft;
  if (name == "dct") return DescriptorMethod::dct;
  if (name == "dwt") return DescriptorMethod::dwt;
  if (name == "grad3d") return DescriptorMethod::grad3d;
  if (name == "hog") return DescriptorMethod::hog;
  if (name == "cog") return DescriptorMethod::cog;
  fail("unknown descriptor method '" + name + "'");
}

void ExperimentConfig::validate() const {
  detector.validate();
  sc.validate();
  transform.validate();
  ratio.validate();
  if (pca_enabled)
    require(pca_components >= 1, "config: pca n_components must be >= 1");
  require(codebook_k >= 1, "config: codebook k must be >= 1");
  require(knn_k >= 1, "config: knn k must be >= 1");
  grid.validate();
  require(runs >= 1, "config: runs must be >= 1");
  require(max_frames >= 1, "config: max_frames must be >= 1");
}

namespace {

TransformMethod transform_method_of(DescriptorMethod m) {
  switch (m) {
    case DescriptorMethod::dft: return TransformMethod::dft;
    case DescriptorMethod::dct: return TransformMethod::dct;
    default: return TransformMethod::dwt;
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("config: invalid JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    if (j.contains("detector")) {
      const auto& d = j["detector"];
      if (d.contains("sigma")) cfg.detector.sigma = d["sigma"].get<double>();
      if (d.contains("tau")) cfg.detector.tau = d["tau"].get<double>();
      if (d.contains("n_points"))
        cfg.detector.n_points = d["n_points"].get<int>();
    }
    if (j.contains("descriptor")) {
      const auto& d = j["descriptor"];
      if (d.contains("method"))
        cfg.method = descriptor_method_from(d["method"].get<std::string>());
      cfg.transform = TransformParams::defaults(transform_method_of(cfg.method));
      if (d.contains("per_plane_budget"))
        cfg.transform.per_plane_budget = d["per_plane_budget"].get<int>();
      if (d.contains("dwt_levels"))
        cfg.transform.dwt_levels = d["dwt_levels"].get<int>();
      if (d.contains("dwt_taps"))
        cfg.transform.dwt_taps = d["dwt_taps"].get<int>();
      if (d.contains("n_radial")) cfg.sc.n_radial = d["n_radial"].get<int>();
      if (d.contains("n_angular"))
        cfg.sc.n_angular = d["n_angular"].get<int>();
      if (d.contains("radial_spacing")) {
        std::string s = d["radial_spacing"].get<std::string>();
        require(s == "log" || s == "linear",
                "config: radial_spacing must be log or linear");
        cfg.sc.spacing =
            s == "log" ? RadialSpacing::log_spaced : RadialSpacing::linear;
      }
      if (d.contains("partitions"))
        cfg.ratio.partitions = d["partitions"].get<int>();
      if (d.contains("d_max")) cfg.ratio.d_max = d["d_max"].get<int>();
      if (d.contains("epsilon"))
        cfg.ratio.epsilon = d["epsilon"].get<double>();
    }
    if (j.contains("pca")) {
      const auto& d = j["pca"];
      if (d.contains("enabled")) cfg.pca_enabled = d["enabled"].get<bool>();
      if (d.contains("n_components"))
        cfg.pca_components = d["n_components"].get<int>();
    }
    if (j.contains("codebook")) {
      const auto& d = j["codebook"];
      if (d.contains("k")) cfg.codebook_k = d["k"].get<int>();
    }
    if (j.contains("classifier")) {
      const auto& d = j["classifier"];
      if (d.contains("method")) {
        std::string s = d["method"].get<std::string>();
        require(s == "knn" || s == "svm",
                "config: classifier must be knn or svm");
        cfg.classifier = s == "knn" ? ClassifierKind::knn
                                    : ClassifierKind::svm;
      }
      if (d.contains("k_neighbors"))
        cfg.knn_k = d["k_neighbors"].get<int>();
      if (d.contains("folds")) cfg.grid.folds = d["folds"].get<int>();
      if (d.contains("c_grid"))
        cfg.grid.c_grid = d["c_grid"].get<std::vector<double>>();
      if (d.contains("gamma_grid"))
        cfg.grid.gamma_grid = d["gamma_grid"].get<std::vector<double>>();
    }
    if (j.contains("runs")) cfg.runs = j["runs"].get<int>();
    if (j.contains("max_frames")) cfg.max_frames = j["max_frames"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(std::string("config: bad field type: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_config(text);
}

Matrix describe_sequence(const VideoVolume& video, const PointCloud& cloud,
                         const ExperimentConfig& cfg) {
  require(!cloud.points.empty(), "no interest points detected");
  switch (cfg.method) {
    case DescriptorMethod::sc3d:
      return sc3d_descriptors(cloud, cfg.sc);
    case DescriptorMethod::psc3d:
      return projected_3dsc_descriptors(cloud, cfg.sc);
    default: break;
  }
  std::vector<Cuboid> cuboids = extract_cuboids(video, cloud, cfg.detector);
  TransformParams tp = cfg.transform;
  tp.method = transform_method_of(cfg.method);
  Matrix out;
  for (const Cuboid& c : cuboids) {
    switch (cfg.method) {
      case DescriptorMethod::dft:
      case DescriptorMethod::dct:
      case DescriptorMethod::dwt:
        out.append_row(transform_descriptor(c, tp));
        break;
      case DescriptorMethod::grad3d:
        out.append_row(gradient_concat_descriptor(c));
        break;
      case DescriptorMethod::hog:
        out.append_row(hog_ratio_descriptor(c, cfg.ratio));
        break;
      case DescriptorMethod::cog:
        out.append_row(cog_descriptor(c, cfg.ratio));
        break;
      default:
        fail("unreachable");
    }
  }
  return out;
}

PreparedData prepare_data(const ExperimentConfig& cfg,
                          const DatasetManifest& manifest) {
  cfg.validate();
  require(!manifest.entries.empty(), "pipeline: empty manifest");
  PreparedData data;
  std::set<std::string> labels;
  for (const ManifestEntry& e : manifest.entries) {
    labels.insert(e.label);
    try {
      VideoVolume video = load_frame_sequence(e.path, cfg.max_frames);
      PointCloud cloud = detect(video, cfg.detector);
      data.descriptors.push_back(describe_sequence(video, cloud, cfg));
      data.entries.push_back(e);
    } catch (const Error& err) {
      fail("[describe] sequence '" + e.sequence_id + "': " + err.what());
    }
  }
  data.classes.assign(labels.begin(), labels.end());

  if (cfg.pca_enabled) {
    Matrix pool(0, data.descriptors.front().cols);
    for (size_t i = 0; i < data.entries.size(); ++i) {
      if (data.entries[i].split != "train") continue;
      const Matrix& m = data.descriptors[i];
      for (size_t r = 0; r < m.rows; ++r)
        pool.append_row(std::vector<double>(m.row(r), m.row(r) + m.cols));
    }
    require(pool.rows >= 2, "[pca] too few training descriptors");
    PcaModel pca;
    try {
      pca = pca_fit(pool, cfg.pca_components);
    } catch (const Error& err) {
      fail(std::string("[pca] ") + err.what());
    }
    for (Matrix& m : data.descriptors) m = pca_project_all(pca, m);
  }
  return data;
}

RunResult run_prepared(const ExperimentConfig& cfg, const PreparedData& data,
                       uint64_t run_seed) {
  std::vector<size_t> train_idx, test_idx;
  for (size_t i = 0; i < data.entries.size(); ++i)
    (data.entries[i].split == "train" ? train_idx : test_idx).push_back(i);
  require(!train_idx.empty(), "pipeline: no training sequences");
  require(!test_idx.empty(), "pipeline: no test sequences");

  Matrix pool(0, data.descriptors.front().cols);
  for (size_t i : train_idx) {
    const Matrix& m = data.descriptors[i];
    for (size_t r = 0; r < m.rows; ++r)
      pool.append_row(std::vector<double>(m.row(r), m.row(r) + m.cols));
  }
  require(pool.rows >= static_cast<size_t>(cfg.codebook_k),
          "[codebook] fewer training descriptors than k");
  Codebook cb;
  try {
    cb = kmeans_fit(pool, cfg.codebook_k, run_seed).codebook;
  } catch (const Error& err) {
    fail(std::string("[codebook] ") + err.what());
  }

  Matrix bows(data.entries.size(), cb.centroids.rows);
  for (size_t i = 0; i < data.entries.size(); ++i) {
    std::vector<int> counts = bow_encode(cb, data.descriptors[i]);
    for (size_t w = 0; w < counts.size(); ++w)
      bows.at(i, w) = double(counts[w]);
  }

  std::vector<std::string> truth, pred;
  try {
    if (cfg.classifier == ClassifierKind::knn) {
      KnnModel knn;
      knn.k_neighbors = cfg.knn_k;
      knn.train = Matrix(0, bows.cols);
      for (size_t i : train_idx) {
        knn.train.append_row(
            std::vector<double>(bows.row(i), bows.row(i) + bows.cols));
        knn.labels.push_back(data.entries[i].label);
      }
      for (size_t i : test_idx) {
        truth.push_back(data.entries[i].label);
        pred.push_back(knn_predict(knn, bows.row(i), bows.cols));
      }
    } else {
      Matrix trainX(0, bows.cols);
      std::vector<std::string> trainY;
      for (size_t i : train_idx) {
        trainX.append_row(
            std::vector<double>(bows.row(i), bows.row(i) + bows.cols));
        trainY.push_back(data.entries[i].label);
      }
      SvmModel svm = svm_train_multiclass(trainX, trainY, cfg.grid,
                                          run_seed + 1);
      for (size_t i : test_idx) {
        truth.push_back(data.entries[i].label);
        pred.push_back(svm_predict(svm, bows.row(i), bows.cols));
      }
    }
  } catch (const Error& err) {
    fail(std::string("[classify] ") + err.what());
  }

  RunResult res;
  res.confusion = confusion_from_predictions(truth, pred, data.classes);
  res.accuracy = accuracy(res.confusion);
  return res;
}

RunResult run_experiment(const ExperimentConfig& cfg,
                         const DatasetManifest& manifest, uint64_t run_seed) {
  return run_prepared(cfg, prepare_data(cfg, manifest), run_seed);
}

AverageResult average_runs(const ExperimentConfig& cfg,
                           const DatasetManifest& manifest,
                           uint64_t base_seed) {
  PreparedData data = prepare_data(cfg, manifest);
  AverageResult avg;
  for (int r = 0; r < cfg.runs; ++r) {
    RunResult res = run_prepared(cfg, data, base_seed + r);
    avg.per_run.push_back(res.accuracy);
    if (r == 0) {
      avg.mean_confusion = res.confusion;
    } else {
      for (size_t i = 0; i < avg.mean_confusion.counts.data.size(); ++i)
        avg.mean_confusion.counts.data[i] += res.confusion.counts.data[i];
    }
  }
  for (double& v : avg.mean_confusion.counts.data) v /= cfg.runs;
  double sum = 0.0;
  for (double a : avg.per_run) sum += a;
  avg.mean = sum / cfg.runs;
  if (cfg.runs > 1) {
    double ss = 0.0;
    for (double a : avg.per_run) ss += (a - avg.mean) * (a - avg.mean);
    avg.stddev = std::sqrt(ss / (cfg.runs - 1));
  }
  return avg;
}

DatasetManifest split_by_subject(const DatasetManifest& manifest,
                                 int train_max) {
  DatasetManifest out = manifest;
  std::set<int> subjects;
  for (ManifestEntry& e : out.entries) {
    int id = 0;
    try {
      id = std::stoi(e.subject);
    } catch (const std::exception&) {
      fail("split: subject '" + e.subject + "' is not numeric");
    }
    subjects.insert(id);
    e.split = id <= train_max ? "train" : "test";
  }
  if (subjects.size() < 25)
    std::cerr << "warning: manifest covers " << subjects.size()
              << " subjects (expected 25 for the full corpus)\n";
  return out;
}

SweepResult sweep(const ExperimentConfig& cfg, const std::string& axis,
                  std::vector<double> values, const DatasetManifest& manifest,
                  uint64_t base_seed) {
  require(!values.empty(), "sweep: no values given");
  std::sort(values.begin(), values.end());
  for (size_t i = 1; i < values.size(); ++i)
    require(values[i] > values[i - 1], "sweep: duplicate axis value");

  SweepResult result;
  result.axis = axis;
  for (double v : values) {
    ExperimentConfig c = cfg;
    int iv = static_cast<int>(std::lround(v));
    if (axis == "n_cuboids")
      c.detector.n_points = iv;
    else if (axis == "codebook_k")
      c.codebook_k = iv;
    else if (axis == "partitions")
      c.ratio.partitions = iv;
    else if (axis == "distances")
      c.ratio.d_max = iv;
    else if (axis == "angular_bins")
      c.sc.n_angular = iv;
    else if (axis == "radial_bins")
      c.sc.n_radial = iv;
    else
      fail("sweep: unknown axis '" + axis + "'");
    AverageResult avg = average_runs(c, manifest, base_seed);
    result.points.push_back({v, avg.mean, avg.stddev});
  }
  return result;
}

DatasetManifest load_manifest_resolved(const std::string& manifest_path) {
  DatasetManifest m = load_manifest(manifest_path);
  fs::path base = fs::path(manifest_path).parent_path();
  for (ManifestEntry& e : m.entries) {
    fs::path p(e.path);
    if (p.is_relative()) e.path = (base / p).string();
  }
  return m;
}

std::string write_synthetic_dataset(const std::string& dir, int classes,
                                    int train_per_class, int test_per_class,
                                    int width, int height, int frames,
                                    uint64_t seed) {
  require(classes == 2, "synthetic dataset: exactly 2 classes supported");
  require(train_per_class >= 1 && test_per_class >= 1,
          "synthetic dataset: need at least one sequence per class/split");
  fs::create_directories(dir);
  std::string manifest_path = (fs::path(dir) / "manifest.csv").string();
  std::ofstream mf(manifest_path);
  require(mf.good(), "cannot write manifest: " + manifest_path);
  mf << "sequence_id,path,label,subject,split\n";
  const char* labels[2] = {"blob_h", "blob_v"};
  for (int c = 0; c < classes; ++c) {
    SyntheticKind kind = c == 0 ? SyntheticKind::oscillating_blob_h
                                : SyntheticKind::oscillating_blob_v;
    int total = train_per_class + test_per_class;
    for (int i = 0; i < total; ++i) {
      bool is_train = i < train_per_class;
      std::string id = std::string(labels[c]) + "_" +
                       (is_train ? "tr" : "te") + std::to_string(i);
      uint64_t seq_seed = seed * 1000003ull + uint64_t(c) * 1000ull + i;
      VideoVolume v = generate_synthetic_sequence(kind, width, height,
                                                  frames, seq_seed);
      std::string frames_dir = (fs::path(dir) / id).string();
      write_frame_sequence(frames_dir, "f", v);
      // Subjects are unique per sequence and never straddle the split.
      mf << id << ',' << id << ',' << labels[c] << ",subj_" << id << ','
         << (is_train ? "train" : "test") << '\n';
    }
  }
  require(mf.good(), "write failed: " + manifest_path);
  return manifest_path;
}

}  // namespace stipbow
