#include "stipbow/pca.hpp"

#include <Eigen/Dense>

#include <cmath>

#include "stipbow/error.hpp"

namespace stipbow {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                           Eigen::RowMajor>;

void fix_sign(double* comp, size_t dim) {
  size_t best = 0;
  for (size_t i = 1; i < dim; ++i)
    if (std::fabs(comp[i]) > std::fabs(comp[best])) best = i;
  if (comp[best] < 0.0)
    for (size_t i = 0; i < dim; ++i) comp[i] = -comp[i];
}

}  // namespace

PcaModel pca_fit(const Matrix& samples, int n_components) {
  size_t n = samples.rows, d = samples.cols;
  require(n >= 2, "pca_fit: need at least 2 samples");
  require(d >= 1, "pca_fit: empty descriptors");
  require(n_components >= 1, "pca_fit: n_components must be >= 1");
  require(static_cast<size_t>(n_components) <= std::min(d, n - 1),
          "pca_fit: n_components exceeds min(dim, samples-1)");

  Eigen::Map<const EMat> X(samples.data.data(), n, d);
  Eigen::RowVectorXd mean = X.colwise().mean();
  EMat centered = X.rowwise() - mean;

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d);
  model.components = Matrix(n_components, d);
  model.explained_variance.resize(n_components);

  if (d <= n) {
    Eigen::MatrixXd cov =
        (centered.transpose() * centered) / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    require(es.info() == Eigen::Success, "pca_fit: eigensolver failed");
    const auto& vals = es.eigenvalues();   // ascending
    const auto& vecs = es.eigenvectors();  // columns match vals
    double lmax = vals(d - 1);
    require(lmax > 0.0, "pca_fit: data has zero variance");
    for (int i = 0; i < n_components; ++i) {
      double lambda = vals(d - 1 - i);
      require(lambda > lmax * 1e-10,
              "pca_fit: data rank below n_components");
      model.explained_variance[i] = lambda;
      Eigen::VectorXd v = vecs.col(d - 1 - i);
      for (size_t j = 0; j < d; ++j) model.components.at(i, j) = v(j);
      fix_sign(model.components.row(i), d);
    }
  } else {
    // Snapshot method: eigenvectors of the small n x n Gram matrix map to
    // covariance eigenvectors via X^T u (identical nonzero spectrum).
    Eigen::MatrixXd gram = (centered * centered.transpose()) / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    require(es.info() == Eigen::Success, "pca_fit: eigensolver failed");
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    double lmax = vals(n - 1);
    require(lmax > 0.0, "pca_fit: data has zero variance");
    for (int i = 0; i < n_components; ++i) {
      double lambda = vals(n - 1 - i);
      require(lambda > lmax * 1e-10,
              "pca_fit: data rank below n_components");
      model.explained_variance[i] = lambda;
      Eigen::VectorXd v = centered.transpose() * vecs.col(n - 1 - i);
      double norm = v.norm();
      require(norm > 0.0, "pca_fit: degenerate component");
      v /= norm;
      for (size_t j = 0; j < d; ++j) model.components.at(i, j) = v(j);
      fix_sign(model.components.row(i), d);
    }
  }
  return model;
}

std::vector<double> pca_project(const PcaModel& m,
                                const std::vector<double>& v) {
  require(v.size() == m.dim(), "pca_project: dimension mismatch");
  std::vector<double> out(m.components.rows, 0.0);
  for (size_t i = 0; i < m.components.rows; ++i) {
    const double* c = m.components.row(i);
    double acc = 0.0;
    for (size_t j = 0; j < v.size(); ++j) acc += c[j] * (v[j] - m.mean[j]);
    out[i] = acc;
  }
  return out;
}

Matrix pca_project_all(const PcaModel& m, const Matrix& samples) {
  require(samples.cols == m.dim(), "pca_project: dimension mismatch");
  Matrix out(samples.rows, m.components.rows);
  for (size_t r = 0; r < samples.rows; ++r) {
    const double* v = samples.row(r);
    for (size_t i = 0; i < m.components.rows; ++i) {
      const double* c = m.components.row(i);
      double acc = 0.0;
      for (size_t j = 0; j < samples.cols; ++j)
        acc += c[j] * (v[j] - m.mean[j]);
      out.at(r, i) = acc;
    }
  }
  return out;
}

std::vector<double> pca_reconstruct(const PcaModel& m,
                                    const std::vector<double>& projected) {
  require(projected.size() == m.components.rows,
          "pca_reconstruct: dimension mismatch");
  std::vector<double> out(m.mean);
  for (size_t i = 0; i < m.components.rows; ++i) {
    const double* c = m.components.row(i);
    for (size_t j = 0; j < out.size(); ++j) out[j] += projected[i] * c[j];
  }
  return out;
}

}  // namespace stipbow
