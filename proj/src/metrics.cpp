#include "stipbow/metrics.hpp"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "stipbow/error.hpp"
#include "stipbow/serial.hpp"

namespace stipbow {

ConfusionMatrix confusion_from_predictions(
    const std::vector<std::string>& truth,
    const std::vector<std::string>& pred,
    const std::vector<std::string>& classes) {
  require(truth.size() == pred.size(),
          "confusion: truth/prediction length mismatch");
  require(!classes.empty(), "confusion: empty class list");
  ConfusionMatrix cm;
  cm.classes = classes;
  cm.counts = Matrix(classes.size(), classes.size(), 0.0);
  auto index_of = [&](const std::string& label) {
    auto it = std::find(classes.begin(), classes.end(), label);
    require(it != classes.end(), "confusion: unknown label '" + label + "'");
    return static_cast<size_t>(it - classes.begin());
  };
  for (size_t i = 0; i < truth.size(); ++i)
    cm.counts.at(index_of(truth[i]), index_of(pred[i])) += 1.0;
  return cm;
}

double accuracy(const ConfusionMatrix& cm) {
  require(cm.counts.rows > 0, "accuracy: empty confusion matrix");
  double trace = 0.0, total = 0.0;
  for (size_t r = 0; r < cm.counts.rows; ++r)
    for (size_t c = 0; c < cm.counts.cols; ++c) {
      total += cm.counts.at(r, c);
      if (r == c) trace += cm.counts.at(r, c);
    }
  require(total > 0.0, "accuracy: no samples counted");
  return trace / total;
}

void write_confusion_csv(const std::string& path, const ConfusionMatrix& cm) {
  std::ofstream o(path);
  require(o.good(), "cannot write file: " + path);
  o << "true\\pred";
  for (const std::string& c : cm.classes) o << ',' << c;
  o << '\n';
  for (size_t r = 0; r < cm.counts.rows; ++r) {
    o << cm.classes[r];
    for (size_t c = 0; c < cm.counts.cols; ++c)
      o << ',' << format_double(cm.counts.at(r, c));
    o << '\n';
  }
  require(o.good(), "write failed: " + path);
}

void write_accuracy_json(const std::string& path, double mean,
                         const std::vector<double>& per_run, double stddev) {
  nlohmann::json j;
  j["mean"] = mean;
  j["per_run"] = per_run;
  j["std"] = stddev;
  std::ofstream o(path);
  require(o.good(), "cannot write file: " + path);
  o << j.dump(2) << '\n';
  require(o.good(), "write failed: " + path);
}

void write_sweep_csv(const std::string& path, const SweepResult& r) {
  std::ofstream o(path);
  require(o.good(), "cannot write file: " + path);
  o << "axis,value,mean_accuracy,std\n";
  for (const SweepPoint& p : r.points)
    o << r.axis << ',' << format_double(p.value) << ','
      << format_double(p.mean_accuracy) << ',' << format_double(p.stddev)
      << '\n';
  require(o.good(), "write failed: " + path);
}

}  // namespace stipbow
