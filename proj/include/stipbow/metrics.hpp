#pragma once

#include <string>
#include <vector>

#include "stipbow/matrix.hpp"

namespace stipbow {

// Rows = true class, cols = predicted class, both in `classes` order.
// Counts are doubles so run-averaged matrices share the type; single-run
// entries are whole numbers.
struct ConfusionMatrix {
  std::vector<std::string> classes;
  Matrix counts;
};

ConfusionMatrix confusion_from_predictions(
    const std::vector<std::string>& truth,
    const std::vector<std::string>& pred,
    const std::vector<std::string>& classes);

// trace / total; errors on an empty matrix.
double accuracy(const ConfusionMatrix& cm);

// CSV with the class list as both header row and leading column.
void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm);

// {"mean": ..., "per_run": [...], "std": ...}
void write_accuracy_json(const std::string& path, double mean,
                         const std::vector<double>& per_run, double stddev);

struct SweepPoint {
  double value = 0.0;
  double mean_accuracy = 0.0;
  double stddev = 0.0;
};

struct SweepResult {
  std::string axis;
  std::vector<SweepPoint> points;  // values strictly increasing
};

// CSV `axis,value,mean_accuracy,std`, one row per point.
void write_sweep_csv(const std::string& path, const SweepResult& r);

}  // namespace stipbow
