#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "tkml/label_set.hpp"
#include "tkml/topk_math.hpp"

namespace tkml {

class Dataset;
class Predictor;

/// The labels of the k highest scores, ties broken toward the smaller index.
/// Requires 1 <= k < m.
LabelSet top_k_set(const ScoreVector& scores, int k);

/// Top-k label consistency: 1 when one set contains the other (or they are
/// equal), 0 otherwise. An attack succeeds when this is 0.
int consistency(const LabelSet& truth, const LabelSet& predicted);

/// consistency(truth, top_k_set(scores, k)).
int consistency_at(const LabelSet& truth, const ScoreVector& scores, int k);

/// Box-clips x + z into [lo, hi].
Vector clip_to_box(const Vector& x, double lo, double hi);

struct EvalRecord {
  std::int64_t instance_id = 0;
  LabelSet truth;
  bool success = false;
  double perturbation_norm = 0.0;
  int input_dim = 1;
};

/// Fraction of records whose attack succeeded. Throws ParameterError when empty.
double asr(std::span<const EvalRecord> records);

/// Mean of ||z||_2 / d over the successful records. The formula divides the
/// success-masked sum by n * ASR; nullopt when there is no success.
std::optional<double> pert(std::span<const EvalRecord> records);

/// Fraction of dataset instances fooled by the shared z, evaluated at the
/// box-clipped x_i + z.
double uasr(const Predictor& model, const Dataset& data, const Vector& z, int k,
            double clip_low = -1.0, double clip_high = 1.0);

enum class TargetStrategy { kBest, kRandom, kWorst };

std::string_view strategy_name(TargetStrategy s) noexcept;
TargetStrategy strategy_from_name(std::string_view name);

class TargetSet;

/// k non-true labels: the highest-scored (Best), a uniform sample (Random),
/// or the lowest-scored (Worst). Throws ParameterError when fewer than k
/// non-true labels exist.
TargetSet select_targets(const ScoreVector& scores, const LabelSet& truth, int k,
                         TargetStrategy strategy, std::uint64_t seed = 0);

}  // namespace tkml
