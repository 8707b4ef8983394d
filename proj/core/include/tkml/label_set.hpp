#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace tkml {

/// A subset of the label universe {0, ..., m-1}. Stored as sorted, unique
/// indices; the multi-hot view is derived on demand.
class LabelSet {
 public:
  LabelSet() = default;

  /// Throws ParameterError on an index outside [0, m) or m < 1.
  /// Duplicates are collapsed.
  LabelSet(int num_labels, std::span<const int> indices);
  LabelSet(int num_labels, std::initializer_list<int> indices)
      : LabelSet(num_labels, std::span<const int>(indices.begin(), indices.size())) {}

  /// Builds from a {0,1} vector of length m.
  static LabelSet from_multi_hot(std::span<const int> multi_hot);

  int num_labels() const noexcept { return num_labels_; }
  int size() const noexcept { return static_cast<int>(indices_.size()); }
  bool empty() const noexcept { return indices_.empty(); }
  bool contains(int label) const noexcept;

  const std::vector<int>& indices() const noexcept { return indices_; }
  std::vector<int> multi_hot() const;

  /// True when every element of this set is also in `other`.
  bool is_subset_of(const LabelSet& other) const;

  friend bool operator==(const LabelSet&, const LabelSet&) = default;

 private:
  int num_labels_ = 0;
  std::vector<int> indices_;
};

/// k labels planted by a targeted attack; never overlaps the ground truth.
class TargetSet {
 public:
  /// Throws ParameterError when |labels| != k or labels intersect truth.
  TargetSet(LabelSet labels, const LabelSet& truth, int k);

  const LabelSet& labels() const noexcept { return labels_; }
  int k() const noexcept { return labels_.size(); }
  int num_labels() const noexcept { return labels_.num_labels(); }
  bool contains(int label) const noexcept { return labels_.contains(label); }

  /// +1 for a target label, -1 otherwise.
  double sign(int label) const noexcept { return contains(label) ? 1.0 : -1.0; }

 private:
  LabelSet labels_;
};

}  // namespace tkml
