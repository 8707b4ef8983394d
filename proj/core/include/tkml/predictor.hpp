#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tkml/topk_math.hpp"

namespace tkml {

class Dataset;

/// A differentiable multi-label scorer F: R^d -> (0, 1)^m.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual ScoreVector predict(const Vector& x) const = 0;
  /// m x d matrix of d f_j / d x.
  virtual Matrix input_jacobian(const Vector& x) const = 0;
  virtual int num_labels() const = 0;
  virtual int input_dim() const = 0;
};

/// Logistic map 1 / (1 + exp(-raw)). The result is clamped into the open
/// interval so calibrated scores never reach exactly 0 or 1.
double sigmoid_calibrate(double raw) noexcept;

enum class Activation { kTanh, kRelu, kIdentity };

std::string_view activation_name(Activation a) noexcept;
Activation activation_from_name(std::string_view name);

struct DenseLayer {
  Matrix weights;  // out x in
  Vector bias;     // out
};

/// Fully connected network with a sigmoid output layer. Zero hidden layers
/// gives the linear-sigmoid model f_j = sigmoid(w_j . x + b_j).
class MlpModel final : public Predictor {
 public:
  MlpModel() = default;
  /// Throws ShapeError when consecutive layers do not chain, ParameterError
  /// on non-finite parameters or an empty layer list.
  MlpModel(std::vector<DenseLayer> layers, Activation hidden_activation);

  /// Xavier-uniform initialisation for d -> hidden... -> m.
  static MlpModel initialize(int input_dim, const std::vector<int>& hidden_widths,
                             int num_labels, Activation hidden_activation,
                             std::uint64_t seed);

  ScoreVector predict(const Vector& x) const override;
  Matrix input_jacobian(const Vector& x) const override;
  int num_labels() const override;
  int input_dim() const override;

  /// Pre-sigmoid outputs.
  Vector logits(const Vector& x) const;

  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::vector<DenseLayer>& mutable_layers() noexcept { return layers_; }
  Activation hidden_activation() const noexcept { return activation_; }

  friend bool operator==(const MlpModel& a, const MlpModel& b);

 private:
  void check_input(const Vector& x) const;

  std::vector<DenseLayer> layers_;
  Activation activation_ = Activation::kTanh;
};

/// Central differences (f(x + h e_i) - f(x - h e_i)) / 2h for every output/input pair.
Matrix finite_difference_jacobian(const Predictor& model, const Vector& x, double h = 1e-4);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.1;
  int batch_size = 32;
  std::uint64_t seed = 0;
  std::vector<int> hidden_widths{64};
  Activation activation = Activation::kTanh;
};

/// Mean per-label binary cross-entropy over the dataset.
double bce_loss(const MlpModel& model, const Dataset& data);

/// Fraction of instances whose top-k prediction is label-consistent with the truth.
double subset_accuracy(const Predictor& model, const Dataset& data, int k);

/// Minibatch SGD on per-label binary cross-entropy. Deterministic for a
/// given seed; zero epochs returns the initialised model.
MlpModel train_victim(const Dataset& data, const TrainConfig& cfg);

/// Flat JSON document: shapes, activation id, row-major weights.
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);
std::string model_to_json(const MlpModel& model);
MlpModel model_from_json(std::string_view text);

}  // namespace tkml
