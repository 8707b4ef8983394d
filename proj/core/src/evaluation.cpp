#include "tkml/evaluation.hpp"

#include <random>
#include <string>

#include "tkml/dataset.hpp"
#include "tkml/errors.hpp"
#include "tkml/predictor.hpp"

namespace tkml {

LabelSet top_k_set(const ScoreVector& scores, int k) {
  if (k < 1 || k >= scores.size()) {
    throw ParameterError("k must lie in [1, m), got k = " + std::to_string(k) + " with m = " +
                         std::to_string(scores.size()));
  }
  const RankedScores ranked = rank_desc(scores);
  return LabelSet(static_cast<int>(scores.size()),
                  std::span<const int>(ranked.sorted_indices.data(), static_cast<std::size_t>(k)));
}

int consistency(const LabelSet& truth, const LabelSet& predicted) {
  const bool equal = truth == predicted;
  const bool truth_in_pred = !equal && truth.is_subset_of(predicted);
  const bool pred_in_truth = !equal && predicted.is_subset_of(truth);
  return static_cast<int>(truth_in_pred) + static_cast<int>(pred_in_truth) + static_cast<int>(equal);
}

int consistency_at(const LabelSet& truth, const ScoreVector& scores, int k) {
  return consistency(truth, top_k_set(scores, k));
}

Vector clip_to_box(const Vector& x, double lo, double hi) { return x.cwiseMax(lo).cwiseMin(hi); }

double asr(std::span<const EvalRecord> records) {
  if (records.empty()) throw ParameterError("ASR needs at least one record");
  std::size_t wins = 0;
  for (const auto& r : records) wins += r.success ? 1 : 0;
  return static_cast<double>(wins) / static_cast<double>(records.size());
}

std::optional<double> pert(std::span<const EvalRecord> records) {
  if (records.empty()) return std::nullopt;
  const double rate = asr(records);
  if (rate == 0.0) return std::nullopt;
  double masked = 0.0;
  for (const auto& r : records) {
    if (r.success) masked += r.perturbation_norm / r.input_dim;
  }
  return masked / (static_cast<double>(records.size()) * rate);
}

double uasr(const Predictor& model, const Dataset& data, const Vector& z, int k, double clip_low,
            double clip_high) {
  if (data.empty()) throw ParameterError("UASR needs a non-empty dataset");
  std::size_t fooled = 0;
  for (const auto& inst : data.instances()) {
    const Vector adv = clip_to_box(inst.x + z, clip_low, clip_high);
    fooled += consistency_at(inst.truth, model.predict(adv), k) == 0 ? 1 : 0;
  }
  return static_cast<double>(fooled) / static_cast<double>(data.size());
}

std::string_view strategy_name(TargetStrategy s) noexcept {
  switch (s) {
    case TargetStrategy::kBest:
      return "best";
    case TargetStrategy::kRandom:
      return "random";
    case TargetStrategy::kWorst:
      return "worst";
  }
  return "best";
}

TargetStrategy strategy_from_name(std::string_view name) {
  if (name == "best" || name == "Best") return TargetStrategy::kBest;
  if (name == "random" || name == "Random") return TargetStrategy::kRandom;
  if (name == "worst" || name == "Worst") return TargetStrategy::kWorst;
  throw ParameterError("unknown target strategy '" + std::string(name) + "'");
}

TargetSet select_targets(const ScoreVector& scores, const LabelSet& truth, int k,
                         TargetStrategy strategy, std::uint64_t seed) {
  if (truth.num_labels() != scores.size()) {
    throw ParameterError("truth set and scores disagree on the number of labels");
  }
  if (k < 1) throw ParameterError("k must be positive");
  // Non-true labels in descending score order.
  std::vector<int> candidates;
  for (int j : rank_desc(scores).sorted_indices) {
    if (!truth.contains(j)) candidates.push_back(j);
  }
  if (static_cast<int>(candidates.size()) < k) {
    throw ParameterError("only " + std::to_string(candidates.size()) +
                         " non-true labels available for k = " + std::to_string(k));
  }

  std::vector<int> chosen;
  switch (strategy) {
    case TargetStrategy::kBest:
      chosen.assign(candidates.begin(), candidates.begin() + k);
      break;
    case TargetStrategy::kWorst:
      chosen.assign(candidates.end() - k, candidates.end());
      break;
    case TargetStrategy::kRandom: {
      std::mt19937_64 rng(seed);
      for (int t = 0; t < k; ++t) {
        std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(t),
                                                        candidates.size() - 1);
        std::swap(candidates[static_cast<std::size_t>(t)], candidates[pick(rng)]);
      }
      chosen.assign(candidates.begin(), candidates.begin() + k);
      break;
    }
  }
  return TargetSet(LabelSet(truth.num_labels(), chosen), truth, k);
}

}  // namespace tkml
