#include "stipbow/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "stipbow/codebook.hpp"
#include "stipbow/error.hpp"

namespace stipbow {

double chi2_distance(const double* p, const double* q, size_t dim) {
  double acc = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    double s = p[i] + q[i];
    if (s == 0.0) continue;
    double d = p[i] - q[i];
    acc += d * d / s;
  }
  return 0.5 * acc;
}

double chi2_distance(const std::vector<double>& p,
                     const std::vector<double>& q) {
  require(p.size() == q.size(), "chi2_distance: length mismatch");
  return chi2_distance(p.data(), q.data(), p.size());
}

std::string knn_predict(const KnnModel& m, const double* h, size_t dim) {
  require(m.train.rows > 0, "knn_predict: empty model");
  require(m.train.rows == m.labels.size(), "knn_predict: label misalignment");
  require(dim == m.train.cols, "knn_predict: dimension mismatch");
  require(m.k_neighbors >= 1, "knn_predict: k must be >= 1");

  std::vector<std::pair<double, size_t>> dist;
  dist.reserve(m.train.rows);
  for (size_t i = 0; i < m.train.rows; ++i)
    dist.emplace_back(chi2_distance(h, m.train.row(i), dim), i);
  std::sort(dist.begin(), dist.end());

  size_t k = std::min<size_t>(m.k_neighbors, dist.size());
  std::map<std::string, std::pair<int, double>> votes;  // count, chi2 sum
  for (size_t j = 0; j < k; ++j) {
    auto& v = votes[m.labels[dist[j].second]];
    v.first += 1;
    v.second += dist[j].first;
  }
  std::string best;
  int best_count = -1;
  double best_sum = 0.0;
  for (const auto& [label, v] : votes) {
    if (v.first > best_count ||
        (v.first == best_count && v.second < best_sum)) {
      best = label;
      best_count = v.first;
      best_sum = v.second;
    }
    // equal count and sum: the map iterates labels in lexicographic
    // order, so the first seen wins
  }
  return best;
}

std::string knn_predict(const KnnModel& m, const std::vector<double>& h) {
  return knn_predict(m, h.data(), h.size());
}

double rbf_kernel(const double* a, const double* b, size_t dim,
                  double gamma) {
  double acc = 0.0;
  for (size_t i = 0; i < dim; ++i) {
    double d = a[i] - b[i];
    acc += d * d;
  }
  return std::exp(-gamma * acc);
}

BinarySvm svm_train_binary(const Matrix& X, const std::vector<int>& y,
                           double C, double gamma, double tol) {
  size_t n = X.rows;
  require(n >= 2, "svm: need at least 2 samples");
  require(y.size() == n, "svm: label misalignment");
  require(C > 0.0 && gamma > 0.0 && tol > 0.0, "svm: bad hyperparameters");
  bool pos = false, neg = false;
  for (int v : y) {
    require(v == 1 || v == -1, "svm: labels must be +1/-1");
    (v == 1 ? pos : neg) = true;
  }
  require(pos && neg, "svm: both classes must be present");

  Matrix K(n, n);
  for (size_t i = 0; i < n; ++i) {
    K.at(i, i) = 1.0;
    for (size_t j = i + 1; j < n; ++j) {
      double k = rbf_kernel(X.row(i), X.row(j), X.cols, gamma);
      K.at(i, j) = k;
      K.at(j, i) = k;
    }
  }

  std::vector<double> alpha(n, 0.0);
  std::vector<double> grad(n, -1.0);  // gradient of the dual at alpha = 0
  const long max_iter = 1000000;
  double m_up = 0.0, m_low = 0.0;

  for (long iter = 0; iter < max_iter; ++iter) {
    // Maximal violating pair over I_up / I_low.
    long i = -1, j = -1;
    m_up = -std::numeric_limits<double>::infinity();
    m_low = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < n; ++t) {
      double v = -y[t] * grad[t];
      bool in_up = (y[t] == 1 && alpha[t] < C) || (y[t] == -1 && alpha[t] > 0);
      bool in_low =
          (y[t] == -1 && alpha[t] < C) || (y[t] == 1 && alpha[t] > 0);
      if (in_up && v > m_up) {
        m_up = v;
        i = static_cast<long>(t);
      }
      if (in_low && v < m_low) {
        m_low = v;
        j = static_cast<long>(t);
      }
    }
    if (i < 0 || j < 0 || m_up - m_low <= tol) break;

    // Move along alpha_i += y_i t, alpha_j -= y_j t, which keeps y^T a
    // fixed. Unconstrained optimum t* = (m_up - m_low)/(K_ii+K_jj-2K_ij).
    double quad = K.at(i, i) + K.at(j, j) - 2.0 * K.at(i, j);
    if (quad < 1e-12) quad = 1e-12;
    double tstar = (m_up - m_low) / quad;
    double cap_i = y[i] == 1 ? C - alpha[i] : alpha[i];
    double cap_j = y[j] == 1 ? alpha[j] : C - alpha[j];
    double step = std::min(tstar, std::min(cap_i, cap_j));
    double old_i = alpha[i], old_j = alpha[j];
    alpha[i] += y[i] * step;
    alpha[j] -= y[j] * step;
    // Box hits land exactly on the bound so membership tests stay exact.
    if (step >= cap_i) alpha[i] = y[i] == 1 ? C : 0.0;
    if (step >= cap_j) alpha[j] = y[j] == 1 ? 0.0 : C;
    double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (size_t t = 0; t < n; ++t)
      grad[t] += y[t] * (y[i] * K.at(t, i) * di + y[j] * K.at(t, j) * dj);
  }

  BinarySvm model;
  model.C = C;
  model.gamma = gamma;
  double bsum = 0.0;
  size_t bcount = 0;
  for (size_t t = 0; t < n; ++t) {
    if (alpha[t] > 0.0 && alpha[t] < C) {
      bsum += -y[t] * grad[t];
      ++bcount;
    }
  }
  model.b = bcount > 0 ? bsum / double(bcount) : 0.5 * (m_up + m_low);
  model.support_vectors = Matrix(0, X.cols);
  for (size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    std::vector<double> row(X.row(t), X.row(t) + X.cols);
    model.support_vectors.append_row(row);
    model.coef.push_back(alpha[t] * y[t]);
  }
  return model;
}

double svm_decision(const BinarySvm& m, const double* x, size_t dim) {
  require(dim == m.support_vectors.cols, "svm_decision: dimension mismatch");
  double acc = m.b;
  for (size_t i = 0; i < m.support_vectors.rows; ++i)
    acc += m.coef[i] * rbf_kernel(m.support_vectors.row(i), x, dim, m.gamma);
  return acc;
}

double svm_decision(const BinarySvm& m, const std::vector<double>& x) {
  return svm_decision(m, x.data(), x.size());
}

GridSearchSpec GridSearchSpec::defaults() {
  GridSearchSpec s;
  for (int e = -5; e <= 15; e += 2) s.c_grid.push_back(std::exp2(e));
  for (int e = -15; e <= 3; e += 2) s.gamma_grid.push_back(std::exp2(e));
  s.folds = 5;
  return s;
}

void GridSearchSpec::validate() const {
  require(!c_grid.empty() && !gamma_grid.empty(),
          "grid search: empty grid");
  require(folds >= 2, "grid search: folds must be >= 2");
}

std::vector<int> stratified_folds(const std::vector<std::string>& labels,
                                  int folds, uint64_t seed) {
  require(folds >= 2, "stratified_folds: folds must be >= 2");
  std::map<std::string, std::vector<size_t>> by_class;
  for (size_t i = 0; i < labels.size(); ++i)
    by_class[labels[i]].push_back(i);
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), 0);
  for (auto& [label, idx] : by_class) {
    for (size_t i = 0; i + 1 < idx.size(); ++i) {
      size_t j = i + static_cast<size_t>(
                         uniform_below(rng, idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    for (size_t i = 0; i < idx.size(); ++i)
      fold[idx[i]] = static_cast<int>(i % folds);
  }
  return fold;
}

namespace {

std::vector<SvmPair> train_ovo(const Matrix& X, const std::vector<int>& yc,
                               int n_classes, double C, double gamma) {
  std::vector<SvmPair> pairs;
  for (int a = 0; a < n_classes; ++a) {
    for (int b = a + 1; b < n_classes; ++b) {
      Matrix sub(0, X.cols);
      std::vector<int> suby;
      for (size_t i = 0; i < X.rows; ++i) {
        if (yc[i] != a && yc[i] != b) continue;
        std::vector<double> row(X.row(i), X.row(i) + X.cols);
        sub.append_row(row);
        suby.push_back(yc[i] == a ? 1 : -1);
      }
      SvmPair p;
      p.a = a;
      p.b = b;
      p.svm = svm_train_binary(sub, suby, C, gamma);
      pairs.push_back(std::move(p));
    }
  }
  return pairs;
}

int predict_ovo(const std::vector<SvmPair>& pairs, int n_classes,
                const double* x, size_t dim) {
  std::vector<int> votes(n_classes, 0);
  std::vector<double> margin(n_classes, 0.0);
  for (const SvmPair& p : pairs) {
    double d = svm_decision(p.svm, x, dim);
    if (d >= 0.0)
      ++votes[p.a];
    else
      ++votes[p.b];
    margin[p.a] += d;
    margin[p.b] -= d;
  }
  int best = 0;
  for (int c = 1; c < n_classes; ++c) {
    if (votes[c] > votes[best] ||
        (votes[c] == votes[best] && margin[c] > margin[best]))
      best = c;
  }
  return best;
}

}  // namespace

SvmModel svm_train_multiclass(const Matrix& X,
                              const std::vector<std::string>& labels,
                              const GridSearchSpec& spec, uint64_t seed) {
  spec.validate();
  require(X.rows == labels.size(), "svm: label misalignment");
  std::set<std::string> uniq(labels.begin(), labels.end());
  require(uniq.size() >= 2, "svm: need at least 2 classes");

  SvmModel model;
  model.classes.assign(uniq.begin(), uniq.end());
  int n_classes = static_cast<int>(model.classes.size());
  std::vector<int> yc(labels.size());
  for (size_t i = 0; i < labels.size(); ++i)
    yc[i] = static_cast<int>(
        std::lower_bound(model.classes.begin(), model.classes.end(),
                         labels[i]) -
        model.classes.begin());

  std::map<int, size_t> class_count;
  for (int c : yc) ++class_count[c];
  for (const auto& [c, cnt] : class_count)
    require(cnt >= static_cast<size_t>(spec.folds),
            "svm: class '" + model.classes[c] + "' has fewer samples than folds");

  std::vector<int> fold = stratified_folds(labels, spec.folds, seed);

  double best_acc = -1.0;
  double best_c = 0.0, best_g = 0.0;
  for (double C : spec.c_grid) {
    for (double gamma : spec.gamma_grid) {
      size_t correct = 0;
      for (int f = 0; f < spec.folds; ++f) {
        Matrix trainX(0, X.cols);
        std::vector<int> trainY;
        std::vector<size_t> testIdx;
        for (size_t i = 0; i < X.rows; ++i) {
          if (fold[i] == f) {
            testIdx.push_back(i);
          } else {
            std::vector<double> row(X.row(i), X.row(i) + X.cols);
            trainX.append_row(row);
            trainY.push_back(yc[i]);
          }
        }
        std::vector<SvmPair> pairs =
            train_ovo(trainX, trainY, n_classes, C, gamma);
        for (size_t i : testIdx)
          if (predict_ovo(pairs, n_classes, X.row(i), X.cols) == yc[i])
            ++correct;
      }
      double acc = double(correct) / double(X.rows);
      if (acc > best_acc) {  // grid iterates C then gamma ascending, so
        best_acc = acc;      // ties keep the smaller C, then smaller gamma
        best_c = C;
        best_g = gamma;
      }
    }
  }

  model.C = best_c;
  model.gamma = best_g;
  model.cv_accuracy = best_acc;
  model.pairs = train_ovo(X, yc, n_classes, best_c, best_g);
  return model;
}

std::string svm_predict(const SvmModel& m, const double* x, size_t dim) {
  require(!m.pairs.empty(), "svm_predict: empty model");
  int c = predict_ovo(m.pairs, static_cast<int>(m.classes.size()), x, dim);
  return m.classes[c];
}

std::string svm_predict(const SvmModel& m, const std::vector<double>& x) {
  return svm_predict(m, x.data(), x.size());
}

}  // namespace stipbow
