#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stipbow/error.hpp"
#include "stipbow/pipeline.hpp"
#include "stipbow/serial.hpp"

namespace fs = std::filesystem;
using namespace stipbow;

namespace {

// Callbacks throw Error; make sure every message carries a stage tag so
// failures are attributable from the exit message alone.
template <class Fn>
void run_stage(const std::string& stage, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    std::string w = e.what();
    if (!w.empty() && w.front() == '[') throw;
    fail("[" + stage + "] " + w);
  }
}

ExperimentConfig config_or_default(const std::string& path) {
  if (path.empty()) {
    ExperimentConfig cfg;
    cfg.validate();
    return cfg;
  }
  return load_config(path);
}

DatasetManifest manifest_for_run(const std::string& path, bool by_subject,
                                 int train_max) {
  DatasetManifest m = load_manifest_resolved(path);
  if (by_subject) m = split_by_subject(m, train_max);
  return m;
}

std::string desc_path(const std::string& dir, const ManifestEntry& e) {
  return (fs::path(dir) / (e.sequence_id + ".desc.bin")).string();
}

std::string bow_path(const std::string& dir, const ManifestEntry& e) {
  return (fs::path(dir) / (e.sequence_id + ".bow.csv")).string();
}

void write_bow(const std::string& path, const std::vector<int>& counts) {
  std::ofstream out(path);
  require(out.good(), "cannot write " + path);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (i) out << ',';
    out << counts[i];
  }
  out << '\n';
  require(out.good(), "write failed: " + path);
}

std::vector<double> read_bow(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty bow file: " + path);
  std::vector<double> v;
  size_t pos = 0;
  while (pos <= line.size()) {
    size_t comma = line.find(',', pos);
    std::string tok = line.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    v.push_back(parse_double(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  require(!v.empty(), "empty bow row: " + path);
  return v;
}

std::string sniff_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open " + path);
  char buf[8] = {};
  in.read(buf, 8);
  require(in.gcount() == 8, "file too short: " + path);
  return std::string(buf, 8);
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> v;
  size_t pos = 0;
  while (pos <= csv.size()) {
    size_t comma = csv.find(',', pos);
    std::string tok = csv.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    v.push_back(parse_double(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return v;
}

Matrix rows_for_split(const DatasetManifest& manifest, const std::string& dir,
                      const std::string& split, std::vector<std::string>* y) {
  Matrix X;
  for (const ManifestEntry& e : manifest.entries) {
    if (e.split != split) continue;
    std::vector<double> row = read_bow(bow_path(dir, e));
    X.append_row(row);
    if (y) y->push_back(e.label);
  }
  require(X.rows > 0, "no '" + split + "' sequences in manifest");
  return X;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bag-of-words action recognition over image sequences"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, in_dir, out_path, points_dir;
  std::string model_path, codebook_path, predictions_path, method_override;
  std::string axis, values_csv, split_sel = "test";
  uint64_t seed = 0;
  int k = 750;
  bool by_subject = false;
  int train_max = 16;
  int n_train = 10, n_test = 4, width = 64, height = 64, frames = 48;
  int n_classes = 2;

  auto add_common = [&](CLI::App* sub, bool need_manifest) {
    sub->add_option("--config", config_path, "experiment config (JSON)");
    auto* m = sub->add_option("--manifest", manifest_path,
                              "dataset manifest CSV");
    if (need_manifest) m->required();
  };

  auto* c_synth = app.add_subcommand(
      "synth", "write a two-class synthetic dataset with a manifest");
  c_synth->add_option("--out", out_path, "target directory")->required();
  c_synth->add_option("--train", n_train, "train sequences per class");
  c_synth->add_option("--test", n_test, "test sequences per class");
  c_synth->add_option("--width", width, "frame width");
  c_synth->add_option("--height", height, "frame height");
  c_synth->add_option("--frames", frames, "frames per sequence");
  c_synth->add_option("--seed", seed, "noise seed");
  c_synth->callback([&] {
    run_stage("synth", [&] {
      std::string mp = write_synthetic_dataset(out_path, n_classes, n_train,
                                               n_test, width, height, frames,
                                               seed);
      std::cout << mp << "\n";
    });
  });

  auto* c_detect = app.add_subcommand(
      "detect", "detect interest points; one points CSV per sequence");
  add_common(c_detect, true);
  c_detect->add_option("--out", out_path, "output directory")->required();
  c_detect->callback([&] {
    run_stage("detect", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      DatasetManifest m = load_manifest_resolved(manifest_path);
      fs::create_directories(out_path);
      for (const ManifestEntry& e : m.entries) {
        try {
          VideoVolume v = load_frame_sequence(e.path, cfg.max_frames);
          PointCloud cloud = detect(v, cfg.detector);
          write_point_cloud_csv(
              (fs::path(out_path) / (e.sequence_id + ".points.csv")).string(),
              cloud);
        } catch (const Error& err) {
          fail("sequence '" + e.sequence_id + "': " + err.what());
        }
      }
    });
  });

  auto* c_describe = app.add_subcommand(
      "describe", "compute descriptors; one binary file per sequence");
  add_common(c_describe, true);
  c_describe->add_option("--out", out_path, "output directory")->required();
  c_describe->add_option("--method", method_override,
                         "sc3d|psc3d|dft|dct|dwt|grad3d|hog|cog");
  c_describe->add_option("--points", points_dir,
                         "reuse point CSVs from a detect stage");
  c_describe->callback([&] {
    run_stage("describe", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      if (!method_override.empty()) {
        cfg.method = descriptor_method_from(method_override);
        if (config_path.empty())
          cfg.transform = TransformParams::defaults(
              cfg.method == DescriptorMethod::dft ? TransformMethod::dft
              : cfg.method == DescriptorMethod::dct ? TransformMethod::dct
                                                    : TransformMethod::dwt);
      }
      DatasetManifest m = load_manifest_resolved(manifest_path);
      fs::create_directories(out_path);
      for (const ManifestEntry& e : m.entries) {
        try {
          VideoVolume v = load_frame_sequence(e.path, cfg.max_frames);
          PointCloud cloud;
          if (points_dir.empty()) {
            cloud = detect(v, cfg.detector);
          } else {
            cloud = read_point_cloud_csv(
                (fs::path(points_dir) / (e.sequence_id + ".points.csv"))
                    .string());
            cloud.width = v.width;
            cloud.height = v.height;
            cloud.frames = v.frames;
          }
          write_descriptors(desc_path(out_path, e),
                            describe_sequence(v, cloud, cfg));
        } catch (const Error& err) {
          fail("sequence '" + e.sequence_id + "': " + err.what());
        }
      }
    });
  });

  auto* c_pca = app.add_subcommand(
      "pca", "fit PCA on train descriptors and project every sequence");
  add_common(c_pca, true);
  c_pca->add_option("--in", in_dir, "descriptor directory")->required();
  c_pca->add_option("--out", out_path, "output directory")->required();
  c_pca->callback([&] {
    run_stage("pca", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      DatasetManifest m = load_manifest_resolved(manifest_path);
      Matrix pool;
      for (const ManifestEntry& e : m.entries) {
        if (e.split != "train") continue;
        Matrix d = read_descriptors(desc_path(in_dir, e));
        for (size_t r = 0; r < d.rows; ++r)
          pool.append_row(std::vector<double>(d.row(r), d.row(r) + d.cols));
      }
      require(pool.rows >= 2, "too few training descriptors");
      PcaModel pca = pca_fit(pool, cfg.pca_components);
      fs::create_directories(out_path);
      write_pca_model((fs::path(out_path) / "pca.bin").string(), pca);
      for (const ManifestEntry& e : m.entries) {
        Matrix d = read_descriptors(desc_path(in_dir, e));
        write_descriptors(desc_path(out_path, e), pca_project_all(pca, d));
      }
    });
  });

  auto* c_codebook = app.add_subcommand(
      "codebook", "K-means codebook from the train-split descriptors");
  add_common(c_codebook, true);
  c_codebook->add_option("--in", in_dir, "descriptor directory")->required();
  c_codebook->add_option("--out", out_path, "codebook file")->required();
  c_codebook->add_option("--k", k, "number of video words");
  c_codebook->add_option("--seed", seed, "sampling seed");
  c_codebook->callback([&] {
    run_stage("codebook", [&] {
      DatasetManifest m = load_manifest_resolved(manifest_path);
      Matrix pool;
      for (const ManifestEntry& e : m.entries) {
        if (e.split != "train") continue;
        Matrix d = read_descriptors(desc_path(in_dir, e));
        for (size_t r = 0; r < d.rows; ++r)
          pool.append_row(std::vector<double>(d.row(r), d.row(r) + d.cols));
      }
      require(pool.rows >= size_t(std::max(k, 1)),
              "fewer training descriptors than k");
      Codebook cb = kmeans_fit(pool, k, seed).codebook;
      if (fs::path(out_path).has_parent_path())
        fs::create_directories(fs::path(out_path).parent_path());
      write_codebook(out_path, cb);
    });
  });

  auto* c_encode = app.add_subcommand(
      "encode", "bag-of-words histograms against a codebook");
  add_common(c_encode, true);
  c_encode->add_option("--in", in_dir, "descriptor directory")->required();
  c_encode->add_option("--codebook", codebook_path, "codebook file")
      ->required();
  c_encode->add_option("--out", out_path, "output directory")->required();
  c_encode->callback([&] {
    run_stage("encode", [&] {
      DatasetManifest m = load_manifest_resolved(manifest_path);
      Codebook cb = read_codebook(codebook_path);
      fs::create_directories(out_path);
      for (const ManifestEntry& e : m.entries) {
        Matrix d = read_descriptors(desc_path(in_dir, e));
        write_bow(bow_path(out_path, e), bow_encode(cb, d));
      }
    });
  });

  auto* c_train = app.add_subcommand(
      "train", "train the configured classifier on train-split histograms");
  add_common(c_train, true);
  c_train->add_option("--in", in_dir, "bow directory")->required();
  c_train->add_option("--out", out_path, "model file")->required();
  c_train->add_option("--seed", seed, "cross-validation seed");
  c_train->callback([&] {
    run_stage("train", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      DatasetManifest m = load_manifest_resolved(manifest_path);
      std::vector<std::string> y;
      Matrix X = rows_for_split(m, in_dir, "train", &y);
      if (fs::path(out_path).has_parent_path())
        fs::create_directories(fs::path(out_path).parent_path());
      if (cfg.classifier == ClassifierKind::knn) {
        KnnModel knn;
        knn.train = X;
        knn.labels = y;
        knn.k_neighbors = cfg.knn_k;
        write_knn_model(out_path, knn);
      } else {
        write_svm_model(out_path, svm_train_multiclass(X, y, cfg.grid, seed));
      }
    });
  });

  auto* c_predict = app.add_subcommand(
      "predict", "label histograms with a trained model");
  add_common(c_predict, true);
  c_predict->add_option("--in", in_dir, "bow directory")->required();
  c_predict->add_option("--model", model_path, "model file")->required();
  c_predict->add_option("--out", out_path, "predictions CSV")->required();
  c_predict->add_option("--split", split_sel, "test|train|all (default test)");
  c_predict->callback([&] {
    run_stage("predict", [&] {
      DatasetManifest m = load_manifest_resolved(manifest_path);
      require(split_sel == "test" || split_sel == "train" ||
                  split_sel == "all",
              "--split must be test, train, or all");
      std::string magic = sniff_magic(model_path);
      KnnModel knn;
      SvmModel svm;
      bool is_knn = magic == "STIPBWN1";
      if (is_knn)
        knn = read_knn_model(model_path);
      else
        svm = read_svm_model(model_path);
      if (fs::path(out_path).has_parent_path())
        fs::create_directories(fs::path(out_path).parent_path());
      std::ofstream out(out_path);
      require(out.good(), "cannot write " + out_path);
      out << "sequence_id,truth,predicted\n";
      for (const ManifestEntry& e : m.entries) {
        if (split_sel != "all" && e.split != split_sel) continue;
        std::vector<double> h = read_bow(bow_path(in_dir, e));
        std::string p = is_knn ? knn_predict(knn, h) : svm_predict(svm, h);
        out << e.sequence_id << ',' << e.label << ',' << p << '\n';
      }
      require(out.good(), "write failed: " + out_path);
    });
  });

  auto* c_eval = app.add_subcommand(
      "eval", "confusion matrix and accuracy from a predictions CSV");
  c_eval->add_option("--predictions", predictions_path, "predictions CSV")
      ->required();
  c_eval->add_option("--out", out_path, "output directory")->required();
  c_eval->callback([&] {
    run_stage("eval", [&] {
      std::ifstream in(predictions_path);
      require(in.good(), "cannot open " + predictions_path);
      std::string line;
      require(static_cast<bool>(std::getline(in, line)),
              "empty predictions file");
      if (!line.empty() && line.back() == '\r') line.pop_back();
      require(line == "sequence_id,truth,predicted",
              "bad predictions header: " + line);
      std::vector<std::string> truth, pred;
      std::set<std::string> classes;
      while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        size_t a = line.find(',');
        size_t b = line.find(',', a + 1);
        require(a != std::string::npos && b != std::string::npos,
                "bad predictions row: " + line);
        truth.push_back(line.substr(a + 1, b - a - 1));
        pred.push_back(line.substr(b + 1));
        classes.insert(truth.back());
        classes.insert(pred.back());
      }
      require(!truth.empty(), "no prediction rows");
      ConfusionMatrix cm = confusion_from_predictions(
          truth, pred, std::vector<std::string>(classes.begin(),
                                                classes.end()));
      double acc = accuracy(cm);
      fs::create_directories(out_path);
      write_confusion_csv((fs::path(out_path) / "confusion.csv").string(),
                          cm);
      write_accuracy_json((fs::path(out_path) / "accuracy.json").string(),
                          acc, {acc}, 0.0);
      std::cout << "accuracy " << format_double(acc) << "\n";
    });
  });

  auto* c_run = app.add_subcommand(
      "run", "full pipeline, averaged over the configured number of runs");
  add_common(c_run, true);
  c_run->add_option("--out", out_path, "output directory")->required();
  c_run->add_option("--seed", seed, "base seed (run i uses seed + i)");
  c_run->add_flag("--split-by-subject", by_subject,
                  "rewrite splits from subject ids");
  c_run->add_option("--train-subjects-max", train_max,
                    "last subject id assigned to train");
  c_run->callback([&] {
    run_stage("run", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      DatasetManifest m =
          manifest_for_run(manifest_path, by_subject, train_max);
      AverageResult avg = average_runs(cfg, m, seed);
      fs::create_directories(out_path);
      write_accuracy_json((fs::path(out_path) / "accuracy.json").string(),
                          avg.mean, avg.per_run, avg.stddev);
      write_confusion_csv((fs::path(out_path) / "confusion.csv").string(),
                          avg.mean_confusion);
      std::cout << "mean accuracy " << format_double(avg.mean) << " over "
                << cfg.runs << " run(s), std " << format_double(avg.stddev)
                << "\n";
    });
  });

  auto* c_sweep = app.add_subcommand(
      "sweep", "repeat the experiment across one parameter axis");
  add_common(c_sweep, true);
  c_sweep->add_option("--out", out_path, "output directory")->required();
  c_sweep
      ->add_option("--axis", axis,
                   "n_cuboids|codebook_k|partitions|distances|angular_bins|"
                   "radial_bins")
      ->required();
  c_sweep->add_option("--values", values_csv, "comma-separated axis values")
      ->required();
  c_sweep->add_option("--seed", seed, "base seed");
  c_sweep->add_flag("--split-by-subject", by_subject,
                    "rewrite splits from subject ids");
  c_sweep->add_option("--train-subjects-max", train_max,
                      "last subject id assigned to train");
  c_sweep->callback([&] {
    run_stage("sweep", [&] {
      ExperimentConfig cfg = config_or_default(config_path);
      DatasetManifest m =
          manifest_for_run(manifest_path, by_subject, train_max);
      SweepResult r = sweep(cfg, axis, parse_values(values_csv), m, seed);
      fs::create_directories(out_path);
      write_sweep_csv((fs::path(out_path) / "sweep.csv").string(), r);
      for (const SweepPoint& p : r.points)
        std::cout << axis << "=" << format_double(p.value) << " mean "
                  << format_double(p.mean_accuracy) << " std "
                  << format_double(p.stddev) << "\n";
    });
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "stipbow: error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "stipbow: unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
