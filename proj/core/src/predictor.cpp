#include "tkml/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tkml/dataset.hpp"
#include "tkml/errors.hpp"
#include "tkml/evaluation.hpp"

namespace tkml {
namespace {

constexpr double kScoreFloor = std::numeric_limits<double>::min();
const double kScoreCeil = std::nextafter(1.0, 0.0);

double activate(Activation a, double v) {
  switch (a) {
    case Activation::kTanh:
      return std::tanh(v);
    case Activation::kRelu:
      return v > 0.0 ? v : 0.0;
    case Activation::kIdentity:
      return v;
  }
  return v;
}

// Derivative expressed through the pre-activation.
double activate_grad(Activation a, double v) {
  switch (a) {
    case Activation::kTanh: {
      const double t = std::tanh(v);
      return 1.0 - t * t;
    }
    case Activation::kRelu:
      return v > 0.0 ? 1.0 : 0.0;
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

Matrix activate(Activation a, const Matrix& pre) {
  return pre.unaryExpr([a](double v) { return activate(a, v); });
}

Matrix activate_grad(Activation a, const Matrix& pre) {
  return pre.unaryExpr([a](double v) { return activate_grad(a, v); });
}

Matrix sigmoid(const Matrix& logits) {
  return logits.unaryExpr([](double v) { return sigmoid_calibrate(v); });
}

// Forward pass over a batch stored column-wise. Returns the pre-activations
// of every layer (hidden and output).
std::vector<Matrix> forward_pre(const std::vector<DenseLayer>& layers, Activation act,
                                const Matrix& inputs) {
  std::vector<Matrix> pre;
  pre.reserve(layers.size());
  Matrix a = inputs;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    Matrix z = layers[l].weights * a;
    z.colwise() += layers[l].bias;
    if (l + 1 < layers.size()) a = activate(act, z);
    pre.push_back(std::move(z));
  }
  return pre;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace

double sigmoid_calibrate(double raw) noexcept {
  double s;
  if (raw >= 0.0) {
    s = 1.0 / (1.0 + std::exp(-raw));
  } else {
    const double e = std::exp(raw);
    s = e / (1.0 + e);
  }
  return std::clamp(s, kScoreFloor, kScoreCeil);
}

std::string_view activation_name(Activation a) noexcept {
  switch (a) {
    case Activation::kTanh:
      return "tanh";
    case Activation::kRelu:
      return "relu";
    case Activation::kIdentity:
      return "identity";
  }
  return "tanh";
}

Activation activation_from_name(std::string_view name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  if (name == "identity") return Activation::kIdentity;
  throw ParameterError("unknown activation '" + std::string(name) + "'");
}

MlpModel::MlpModel(std::vector<DenseLayer> layers, Activation hidden_activation)
    : layers_(std::move(layers)), activation_(hidden_activation) {
  if (layers_.empty()) throw ParameterError("model needs at least one layer");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw ShapeError("layer " + std::to_string(l) + " has an empty weight matrix");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw ShapeError("layer " + std::to_string(l) + " bias length does not match its outputs");
    }
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows()) {
      throw ShapeError("layer " + std::to_string(l) + " input width does not match layer " +
                       std::to_string(l - 1));
    }
    if (!all_finite(layer.weights) || !all_finite(layer.bias)) {
      throw ParameterError("layer " + std::to_string(l) + " has non-finite parameters");
    }
  }
}

MlpModel MlpModel::initialize(int input_dim, const std::vector<int>& hidden_widths, int num_labels,
                              Activation hidden_activation, std::uint64_t seed) {
  if (input_dim < 1 || num_labels < 1) throw ParameterError("model dimensions must be positive");
  std::mt19937_64 rng(seed);
  std::vector<int> widths{input_dim};
  for (int w : hidden_widths) {
    if (w < 1) throw ParameterError("hidden widths must be positive");
    widths.push_back(w);
  }
  widths.push_back(num_labels);

  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int in = widths[l];
    const int out = widths[l + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer{Matrix(out, in), Vector::Zero(out)};
    // Row-major fill so the draw order matches the serialised layout.
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) layer.weights(r, c) = dist(rng);
    layers.push_back(std::move(layer));
  }
  return MlpModel(std::move(layers), hidden_activation);
}

int MlpModel::num_labels() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.back().weights.rows());
}

int MlpModel::input_dim() const {
  return layers_.empty() ? 0 : static_cast<int>(layers_.front().weights.cols());
}

void MlpModel::check_input(const Vector& x) const {
  if (layers_.empty()) throw ParameterError("model has no layers");
  if (x.size() != input_dim()) {
    throw ShapeError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(input_dim()));
  }
  if (!x.allFinite()) throw InvalidInputError("input contains non-finite values");
}

Vector MlpModel::logits(const Vector& x) const {
  check_input(x);
  return forward_pre(layers_, activation_, x).back();
}

ScoreVector MlpModel::predict(const Vector& x) const { return sigmoid(logits(x)); }

Matrix MlpModel::input_jacobian(const Vector& x) const {
  check_input(x);
  const std::vector<Matrix> pre = forward_pre(layers_, activation_, x);
  const Vector s = sigmoid(pre.back());
  const Vector ds = s.array() * (1.0 - s.array());

  Matrix jac = ds.asDiagonal() * layers_.back().weights;
  for (std::size_t l = layers_.size() - 1; l-- > 0;) {
    const Vector g = activate_grad(activation_, pre[l]);
    jac = (jac * g.asDiagonal()) * layers_[l].weights;
  }
  return jac;
}

bool operator==(const MlpModel& a, const MlpModel& b) {
  if (a.activation_ != b.activation_ || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    const auto& la = a.layers_[l];
    const auto& lb = b.layers_[l];
    if (la.weights.rows() != lb.weights.rows() || la.weights.cols() != lb.weights.cols())
      return false;
    if (la.weights != lb.weights || la.bias != lb.bias) return false;
  }
  return true;
}

Matrix finite_difference_jacobian(const Predictor& model, const Vector& x, double h) {
  if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
  const int m = model.num_labels();
  const int d = model.input_dim();
  if (x.size() != d) throw ShapeError("input dimension does not match the model");
  Matrix jac(m, d);
  Vector probe = x;
  for (int i = 0; i < d; ++i) {
    probe[i] = x[i] + h;
    const Vector up = model.predict(probe);
    probe[i] = x[i] - h;
    const Vector down = model.predict(probe);
    probe[i] = x[i];
    jac.col(i) = (up - down) / (2.0 * h);
  }
  return jac;
}

double bce_loss(const MlpModel& model, const Dataset& data) {
  if (data.empty()) throw ParameterError("dataset is empty");
  double total = 0.0;
  for (const auto& inst : data.instances()) {
    const Vector s = model.predict(inst.x);
    for (int j = 0; j < s.size(); ++j) {
      total -= inst.truth.contains(j) ? std::log(s[j]) : std::log1p(-s[j]);
    }
  }
  return total / (static_cast<double>(data.size()) * model.num_labels());
}

double subset_accuracy(const Predictor& model, const Dataset& data, int k) {
  if (data.empty()) throw ParameterError("dataset is empty");
  int hits = 0;
  for (const auto& inst : data.instances()) {
    hits += consistency_at(inst.truth, model.predict(inst.x), k);
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

MlpModel train_victim(const Dataset& data, const TrainConfig& cfg) {
  if (data.empty()) throw ParameterError("cannot train on an empty dataset");
  if (cfg.epochs < 0) throw ParameterError("epochs must be non-negative");
  if (!(cfg.learning_rate > 0.0)) throw ParameterError("learning rate must be positive");
  if (cfg.batch_size < 1) throw ParameterError("batch size must be positive");

  MlpModel model = MlpModel::initialize(data.input_dim(), cfg.hidden_widths, data.num_labels(),
                                        cfg.activation, cfg.seed);
  // Distinct stream from the initialiser.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);

  const int n = static_cast<int>(data.size());
  const int d = data.input_dim();
  const int m = data.num_labels();
  Matrix inputs(d, n);
  Matrix targets = Matrix::Zero(m, n);
  for (int i = 0; i < n; ++i) {
    inputs.col(i) = data[static_cast<std::size_t>(i)].x;
    for (int j : data[static_cast<std::size_t>(i)].truth.indices()) targets(j, i) = 1.0;
  }

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto& layers = model.mutable_layers();
  const Activation act = model.hidden_activation();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int start = 0; start < n; start += cfg.batch_size) {
      const int count = std::min(cfg.batch_size, n - start);
      Matrix batch_x(d, count);
      Matrix batch_y(m, count);
      for (int b = 0; b < count; ++b) {
        batch_x.col(b) = inputs.col(order[static_cast<std::size_t>(start + b)]);
        batch_y.col(b) = targets.col(order[static_cast<std::size_t>(start + b)]);
      }
      const std::vector<Matrix> pre = forward_pre(layers, act, batch_x);
      // d(sum_j BCE_j)/d logits = sigmoid(logits) - y.
      Matrix delta = sigmoid(pre.back()) - batch_y;
      const double scale = cfg.learning_rate / count;
      for (std::size_t l = layers.size(); l-- > 0;) {
        const Matrix input = l == 0 ? batch_x : activate(act, pre[l - 1]);
        const Matrix grad_w = delta * input.transpose();
        const Vector grad_b = delta.rowwise().sum();
        if (l > 0) {
          delta = (layers[l].weights.transpose() * delta).cwiseProduct(activate_grad(act, pre[l - 1]));
        }
        layers[l].weights -= scale * grad_w;
        layers[l].bias -= scale * grad_b;
      }
    }
  }
  return model;
}

}  // namespace tkml
