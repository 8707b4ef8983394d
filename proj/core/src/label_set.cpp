#include "tkml/label_set.hpp"

#include <algorithm>
#include <string>

#include "tkml/errors.hpp"

namespace tkml {

LabelSet::LabelSet(int num_labels, std::span<const int> indices) : num_labels_(num_labels) {
  if (num_labels < 1) throw ParameterError("label universe must be non-empty");
  indices_.assign(indices.begin(), indices.end());
  for (int j : indices_) {
    if (j < 0 || j >= num_labels) {
      throw ParameterError("label index " + std::to_string(j) + " outside [0, " +
                           std::to_string(num_labels) + ")");
    }
  }
  std::sort(indices_.begin(), indices_.end());
  indices_.erase(std::unique(indices_.begin(), indices_.end()), indices_.end());
}

LabelSet LabelSet::from_multi_hot(std::span<const int> multi_hot) {
  std::vector<int> idx;
  for (std::size_t j = 0; j < multi_hot.size(); ++j) {
    if (multi_hot[j] != 0 && multi_hot[j] != 1) {
      throw ParameterError("multi-hot entries must be 0 or 1");
    }
    if (multi_hot[j] == 1) idx.push_back(static_cast<int>(j));
  }
  return LabelSet(static_cast<int>(multi_hot.size()), idx);
}

bool LabelSet::contains(int label) const noexcept {
  return std::binary_search(indices_.begin(), indices_.end(), label);
}

std::vector<int> LabelSet::multi_hot() const {
  std::vector<int> v(static_cast<std::size_t>(num_labels_), 0);
  for (int j : indices_) v[static_cast<std::size_t>(j)] = 1;
  return v;
}

bool LabelSet::is_subset_of(const LabelSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

TargetSet::TargetSet(LabelSet labels, const LabelSet& truth, int k) : labels_(std::move(labels)) {
  if (labels_.size() != k) {
    throw ParameterError("target set must hold exactly k = " + std::to_string(k) + " labels, got " +
                         std::to_string(labels_.size()));
  }
  if (truth.num_labels() != labels_.num_labels()) {
    throw ParameterError("target and truth use different label universes");
  }
  for (int j : labels_.indices()) {
    if (truth.contains(j)) {
      throw ParameterError("target label " + std::to_string(j) + " is a ground-truth label");
    }
  }
}

}  // namespace tkml
