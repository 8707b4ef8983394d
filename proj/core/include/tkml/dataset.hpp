#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "tkml/label_set.hpp"
#include "tkml/topk_math.hpp"

namespace tkml {

struct Instance {
  Vector x;
  LabelSet truth;
};

/// Instances sharing one input dimension d and label count m. Every truth
/// set is non-empty.
class Dataset {
 public:
  Dataset(int num_labels, int input_dim, std::uint64_t seed = 0);

  /// Throws ShapeError on a mismatched x or label universe, ParameterError
  /// on an empty truth set or non-finite input.
  void add(Instance instance);

  int num_labels() const noexcept { return num_labels_; }
  int input_dim() const noexcept { return input_dim_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }

  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const noexcept { return instances_; }

  /// Instances [first, first + count), clamped to the end.
  Dataset slice(std::size_t first, std::size_t count) const;

 private:
  int num_labels_;
  int input_dim_;
  std::uint64_t seed_;
  std::vector<Instance> instances_;
};

struct SyntheticOptions {
  /// Standard deviation of the per-label prototype coordinates.
  double prototype_scale = 1.0;
  /// Standard deviation of the additive instance noise.
  double noise = 0.3;
  /// Upper bound on |Y|; 0 means m - 1.
  int max_labels = 0;
  /// Zipf exponent of the label frequencies: label j is drawn with weight
  /// (j + 1)^-label_skew. 0 draws labels uniformly.
  double label_skew = 0.0;
};

/// Prototype-mixture generator. Every label gets a Gaussian prototype; an
/// instance sums the prototypes of its labels plus noise. Label counts are
/// 1 + Binomial(m - 1, (avg_labels - 1) / (m - 1)), capped at max_labels, with
/// labels drawn without replacement (uniformly unless label_skew > 0). Inputs are min/max normalised
/// into [-1, 1] per coordinate over the generated set.
Dataset generate_synthetic(int num_labels, int input_dim, int count, double avg_labels,
                           std::uint64_t seed, const SyntheticOptions& options = {});

/// Per-coordinate affine map of [lo, hi] onto [-1, 1]. A constant coordinate
/// (lo == hi) maps to 0.
class Normalizer {
 public:
  Normalizer(Vector lo, Vector hi);
  /// Fits the per-coordinate min/max of the given rows.
  static Normalizer fit(std::span<const Vector> rows);

  Vector apply(const Vector& x_raw) const;

  const Vector& lo() const noexcept { return lo_; }
  const Vector& hi() const noexcept { return hi_; }

 private:
  Vector lo_;
  Vector hi_;
};

/// JSON lines: a header {"m", "d", "seed", "n"} then one {"x": [...], "y": [...]} per instance.
void save_dataset(const Dataset& data, const std::filesystem::path& path);
/// Throws ParseError (with line number) on malformed content, ParameterError
/// when the file holds no instances, IoError when it cannot be read.
Dataset load_dataset(const std::filesystem::path& path);

}  // namespace tkml
