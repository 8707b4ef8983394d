#pragma once

// Independent oracles and random generators shared by the unit and
// acceptance suites. Nothing here calls into the code path it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tkml/label_set.hpp"
#include "tkml/predictor.hpp"
#include "tkml/topk_math.hpp"

namespace tkml::testing {

inline Vector random_scores(std::mt19937_64& rng, int m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector v(m);
  for (int i = 0; i < m; ++i) v[i] = u(rng);
  return v;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline LabelSet random_label_set(std::mt19937_64& rng, int m, int size) {
  std::vector<int> pool(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(size));
  return LabelSet(m, pool);
}

/// Sum of the k largest values via a plain descending sort of a copy.
inline double brute_top_k_sum(const Vector& v, int k) {
  std::vector<double> copy(v.data(), v.data() + v.size());
  std::sort(copy.begin(), copy.end(), std::greater<>());
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += copy[static_cast<std::size_t>(i)];
  return s;
}

inline double brute_kth_largest(const Vector& v, int k) {
  std::vector<double> copy(v.data(), v.data() + v.size());
  std::sort(copy.begin(), copy.end(), std::greater<>());
  return copy[static_cast<std::size_t>(k - 1)];
}

/// Direct evaluation of (1/k)(k*lambda + sum_j max(0, f_j - lambda)).
inline double direct_variational(const Vector& f, int k, double lambda) {
  double s = k * lambda;
  for (int j = 0; j < f.size(); ++j) s += std::max(0.0, f[j] - lambda);
  return s / k;
}

/// Minimum of direct_variational over the grid {0, step, 2 step, ..., 1}.
inline double grid_min_variational(const Vector& f, int k, double step) {
  const int points = static_cast<int>(std::lround(1.0 / step));
  double best = direct_variational(f, k, 0.0);
  for (int i = 1; i <= points; ++i) best = std::min(best, direct_variational(f, k, i * step));
  return best;
}

/// Central-difference gradient of a scalar function of a vector.
inline Vector central_gradient(const std::function<double(const Vector&)>& fn, const Vector& at,
                               double h) {
  Vector g(at.size());
  Vector probe = at;
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + h;
    const double up = fn(probe);
    probe[i] = at[i] - h;
    const double down = fn(probe);
    probe[i] = at[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// ||a - b|| <= tol * max(||a||, ||b||), with an absolute floor for the
/// all-zero case.
inline bool relative_match(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double tol,
                           double floor = 1e-10) {
  const double diff = (a - b).norm();
  return diff <= tol * std::max(a.norm(), b.norm()) || diff <= floor;
}

inline double relative_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

/// Random tanh MLP d -> widths... -> m with N(0, scale^2) weights.
inline MlpModel random_mlp(std::mt19937_64& rng, int d, std::vector<int> widths, int m,
                           double scale = 0.8, Activation act = Activation::kTanh) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<int> dims{d};
  dims.insert(dims.end(), widths.begin(), widths.end());
  dims.push_back(m);
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer layer{Matrix(dims[l + 1], dims[l]), Vector(dims[l + 1])};
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) layer.weights(r, c) = g(rng);
      layer.bias[r] = g(rng);
    }
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers), act);
}

/// Linear-sigmoid model f_j = sigmoid(W x + b)_j.
inline MlpModel linear_model(Matrix weights, Vector bias) {
  return MlpModel({DenseLayer{std::move(weights), std::move(bias)}}, Activation::kTanh);
}

/// 1 / (1 + e^-a) written independently of sigmoid_calibrate.
inline double logistic(double a) { return 1.0 / (1.0 + std::exp(-a)); }

}  // namespace tkml::testing
