#pragma once

#include <string>
#include <vector>

#include "stipbow/classifier.hpp"
#include "stipbow/codebook.hpp"
#include "stipbow/detector.hpp"
#include "stipbow/matrix.hpp"
#include "stipbow/pca.hpp"

namespace stipbow {

// Shortest round-trip decimal form (std::to_chars); every CSV/JSON double
// in this project goes through here so repeated runs are byte-identical.
std::string format_double(double v);
double parse_double(const std::string& s);

// Descriptor container: 16-byte header (u64 magic, u32 dim, u32 count,
// little-endian) followed by count*dim float64 values, row-major.
void write_descriptors(const std::string& path, const Matrix& m);
Matrix read_descriptors(const std::string& path);

// Model containers share the header style with format-specific magics.
void write_pca_model(const std::string& path, const PcaModel& m);
PcaModel read_pca_model(const std::string& path);

void write_codebook(const std::string& path, const Codebook& cb);
Codebook read_codebook(const std::string& path);

void write_knn_model(const std::string& path, const KnnModel& m);
KnnModel read_knn_model(const std::string& path);

void write_svm_model(const std::string& path, const SvmModel& m);
SvmModel read_svm_model(const std::string& path);

// Interest points as CSV `x,y,t,response`, already sorted by the detector.
void write_point_cloud_csv(const std::string& path, const PointCloud& cloud);
PointCloud read_point_cloud_csv(const std::string& path);

}  // namespace stipbow
