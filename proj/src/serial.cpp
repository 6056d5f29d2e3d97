#include "stipbow/serial.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "stipbow/error.hpp"

namespace stipbow {

namespace {

// Magic values spell out the container kind in the first 8 file bytes.
constexpr uint64_t magic_of(const char (&s)[9]) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | static_cast<uint8_t>(s[i]);
  return v;
}
constexpr uint64_t kMagicDesc = magic_of("STIPBWD1");
constexpr uint64_t kMagicPca = magic_of("STIPBWP1");
constexpr uint64_t kMagicCodebook = magic_of("STIPBWK1");
constexpr uint64_t kMagicKnn = magic_of("STIPBWN1");
constexpr uint64_t kMagicSvm = magic_of("STIPBWS1");

void put_u32(std::ostream& o, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  o.write(b, 4);
}

void put_u64(std::ostream& o, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  o.write(b, 8);
}

void put_f64(std::ostream& o, double d) {
  put_u64(o, std::bit_cast<uint64_t>(d));
}

void put_str(std::ostream& o, const std::string& s) {
  put_u32(o, static_cast<uint32_t>(s.size()));
  o.write(s.data(), static_cast<std::streamsize>(s.size()));
}

uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, "binary file: truncated");
  uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

uint64_t get_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  require(in.gcount() == 8, "binary file: truncated");
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

std::string get_str(std::istream& in) {
  uint32_t n = get_u32(in);
  require(n < (1u << 20), "binary file: implausible string length");
  std::string s(n, '\0');
  in.read(s.data(), n);
  require(static_cast<uint32_t>(in.gcount()) == n, "binary file: truncated");
  return s;
}

void put_matrix_payload(std::ostream& o, const Matrix& m) {
  for (double v : m.data) put_f64(o, v);
}

void get_matrix_payload(std::istream& in, Matrix& m) {
  for (double& v : m.data) v = get_f64(in);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream o(path, std::ios::binary);
  require(o.good(), "cannot write file: " + path);
  return o;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open file: " + path);
  return in;
}

void check_magic(std::istream& in, uint64_t want, const std::string& path) {
  require(get_u64(in) == want, "wrong file type: " + path);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  require(ec == std::errc(), "format_double failed");
  return std::string(buf, p);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(),
          "bad numeric field '" + s + "'");
  return v;
}

void write_descriptors(const std::string& path, const Matrix& m) {
  std::ofstream o = open_out(path);
  put_u64(o, kMagicDesc);
  put_u32(o, static_cast<uint32_t>(m.cols));
  put_u32(o, static_cast<uint32_t>(m.rows));
  put_matrix_payload(o, m);
  require(o.good(), "write failed: " + path);
}

Matrix read_descriptors(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMagicDesc, path);
  uint32_t dim = get_u32(in);
  uint32_t count = get_u32(in);
  Matrix m(count, dim);
  get_matrix_payload(in, m);
  return m;
}

void write_pca_model(const std::string& path, const PcaModel& m) {
  std::ofstream o = open_out(path);
  put_u64(o, kMagicPca);
  put_u32(o, static_cast<uint32_t>(m.dim()));
  put_u32(o, static_cast<uint32_t>(m.components.rows));
  for (double v : m.mean) put_f64(o, v);
  put_matrix_payload(o, m.components);
  require(o.good(), "write failed: " + path);
}

PcaModel read_pca_model(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMagicPca, path);
  uint32_t dim = get_u32(in);
  uint32_t nc = get_u32(in);
  PcaModel m;
  m.mean.resize(dim);
  for (double& v : m.mean) v = get_f64(in);
  m.components = Matrix(nc, dim);
  get_matrix_payload(in, m.components);
  return m;
}

void write_codebook(const std::string& path, const Codebook& cb) {
  std::ofstream o = open_out(path);
  put_u64(o, kMagicCodebook);
  put_u32(o, static_cast<uint32_t>(cb.centroids.cols));
  put_u32(o, static_cast<uint32_t>(cb.centroids.rows));
  put_u64(o, cb.seed);
  put_matrix_payload(o, cb.centroids);
  require(o.good(), "write failed: " + path);
}

Codebook read_codebook(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMagicCodebook, path);
  uint32_t dim = get_u32(in);
  uint32_t k = get_u32(in);
  Codebook cb;
  cb.seed = get_u64(in);
  cb.centroids = Matrix(k, dim);
  get_matrix_payload(in, cb.centroids);
  return cb;
}

void write_knn_model(const std::string& path, const KnnModel& m) {
  require(m.train.rows == m.labels.size(), "knn model: label misalignment");
  std::ofstream o = open_out(path);
  put_u64(o, kMagicKnn);
  put_u32(o, static_cast<uint32_t>(m.k_neighbors));
  put_u32(o, static_cast<uint32_t>(m.train.cols));
  put_u32(o, static_cast<uint32_t>(m.train.rows));
  for (const std::string& s : m.labels) put_str(o, s);
  put_matrix_payload(o, m.train);
  require(o.good(), "write failed: " + path);
}

KnnModel read_knn_model(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMagicKnn, path);
  KnnModel m;
  m.k_neighbors = static_cast<int>(get_u32(in));
  uint32_t dim = get_u32(in);
  uint32_t count = get_u32(in);
  m.labels.resize(count);
  for (std::string& s : m.labels) s = get_str(in);
  m.train = Matrix(count, dim);
  get_matrix_payload(in, m.train);
  return m;
}

void write_svm_model(const std::string& path, const SvmModel& m) {
  std::ofstream o = open_out(path);
  put_u64(o, kMagicSvm);
  put_u32(o, 1);  // format version
  put_f64(o, m.C);
  put_f64(o, m.gamma);
  put_f64(o, m.cv_accuracy);
  put_u32(o, static_cast<uint32_t>(m.classes.size()));
  for (const std::string& s : m.classes) put_str(o, s);
  put_u32(o, static_cast<uint32_t>(m.pairs.size()));
  for (const SvmPair& p : m.pairs) {
    put_u32(o, static_cast<uint32_t>(p.a));
    put_u32(o, static_cast<uint32_t>(p.b));
    put_u32(o, static_cast<uint32_t>(p.svm.support_vectors.cols));
    put_u32(o, static_cast<uint32_t>(p.svm.support_vectors.rows));
    put_f64(o, p.svm.b);
    put_f64(o, p.svm.C);
    put_f64(o, p.svm.gamma);
    for (double c : p.svm.coef) put_f64(o, c);
    put_matrix_payload(o, p.svm.support_vectors);
  }
  require(o.good(), "write failed: " + path);
}

SvmModel read_svm_model(const std::string& path) {
  std::ifstream in = open_in(path);
  check_magic(in, kMagicSvm, path);
  require(get_u32(in) == 1, "svm model: unsupported version in " + path);
  SvmModel m;
  m.C = get_f64(in);
  m.gamma = get_f64(in);
  m.cv_accuracy = get_f64(in);
  m.classes.resize(get_u32(in));
  for (std::string& s : m.classes) s = get_str(in);
  m.pairs.resize(get_u32(in));
  for (SvmPair& p : m.pairs) {
    p.a = static_cast<int>(get_u32(in));
    p.b = static_cast<int>(get_u32(in));
    uint32_t dim = get_u32(in);
    uint32_t nsv = get_u32(in);
    p.svm.b = get_f64(in);
    p.svm.C = get_f64(in);
    p.svm.gamma = get_f64(in);
    p.svm.coef.resize(nsv);
    for (double& c : p.svm.coef) c = get_f64(in);
    p.svm.support_vectors = Matrix(nsv, dim);
    get_matrix_payload(in, p.svm.support_vectors);
  }
  return m;
}

void write_point_cloud_csv(const std::string& path, const PointCloud& cloud) {
  std::ofstream o(path);
  require(o.good(), "cannot write file: " + path);
  o << "x,y,t,response\n";
  for (const InterestPoint& p : cloud.points)
    o << p.x << ',' << p.y << ',' << p.t << ','
      << format_double(p.response) << '\n';
  require(o.good(), "write failed: " + path);
}

PointCloud read_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open file: " + path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "points csv: empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "x,y,t,response", "points csv: bad header in " + path);
  PointCloud cloud;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string f[4];
    for (int i = 0; i < 4; ++i)
      require(static_cast<bool>(std::getline(ss, f[i], ',')),
              "points csv: short row in " + path);
    InterestPoint p;
    p.x = static_cast<int>(parse_double(f[0]));
    p.y = static_cast<int>(parse_double(f[1]));
    p.t = static_cast<int>(parse_double(f[2]));
    p.response = parse_double(f[3]);
    cloud.points.push_back(p);
  }
  return cloud;
}

}  // namespace stipbow
