#pragma once

#include <cstdint>

#include "tkml/label_set.hpp"
#include "tkml/topk_math.hpp"

namespace tkml {

class Dataset;
class Predictor;

/// Hyperparameters shared by all attacks. Defaults follow the untargeted
/// setting; see targeted_defaults() and universal_defaults().
struct AttackConfig {
  int k = 3;
  double eta = 0.01;
  int max_iter = 1000;
  /// Weight of the (beta / 2) ||z||^2 term.
  double beta = 0.0;
  /// l2 radius of the feasible ball, used when `projection` is set.
  double epsilon = 10.0;
  bool projection = true;
  double clip_low = -1.0;
  double clip_high = 1.0;
  std::uint64_t seed = 0;
  /// Targeted attacks only: stop at the first successful iterate.
  bool early_exit = false;

  static AttackConfig untargeted_defaults();
  static AttackConfig targeted_defaults();
  static AttackConfig universal_defaults();

  /// Throws ParameterError when the config is unusable for m labels.
  void validate(int num_labels) const;
};

/// Additive input perturbation with its l2 norm.
struct Perturbation {
  Vector z;
  double l2_norm = 0.0;

  static Perturbation of(Vector z);
};

struct AttackResult {
  bool success = false;
  Perturbation perturbation;
  int iterations_used = 0;
  ScoreVector final_scores;
  double final_lambda = 0.0;
};

struct UniversalResult {
  Perturbation z;
  double training_uasr = 0.0;
  int epochs_used = 0;
  /// Set when the epoch cap was hit before reaching the requested UASR.
  bool reached_epoch_cap = false;
};

/// Iterate of the joint (z, lambda) descent.
struct AttackState {
  Vector z;
  double lambda = 0.0;
};

/// Subgradient of a surrogate loss with respect to z and lambda, excluding
/// the beta term.
struct Subgradient {
  Vector dz;
  double dlambda = 0.0;
};

/// Radial projection onto the l2 ball of radius epsilon.
Vector project_l2(const Vector& z, double epsilon);

/// lambda + 1/(m-k) * sum_j hinge(max_{y in Y} f_y - f_j - lambda).
double untargeted_loss(const ScoreVector& scores, const LabelSet& truth, int k, double lambda);

/// Subgradient of untargeted_loss(F(x + z)) at the current iterate. The
/// argmax over true labels breaks ties toward the smaller index and the
/// hinge indicators use strict inequality.
Subgradient untargeted_subgradient(const Predictor& model, const Vector& x, const AttackState& state,
                                   const LabelSet& truth, int k);

/// One descent step followed by the lambda clamp, the optional l2
/// projection and the box clip of x + z.
AttackState untargeted_step(const Predictor& model, const Vector& x, const AttackState& state,
                            const LabelSet& truth, const AttackConfig& cfg);

/// Instance-specific untargeted attack: descends from z = 0, lambda = 0
/// until no longer label-consistent at k, or max_iter steps.
AttackResult attack_untargeted(const Predictor& model, const Vector& x, const LabelSet& truth,
                               const AttackConfig& cfg);

/// sum_j hinge(s_j (lambda - f_j)), s_j = +1 on targets and -1 elsewhere.
double targeted_loss(const ScoreVector& scores, const TargetSet& target, double lambda);

Subgradient targeted_subgradient(const Predictor& model, const Vector& x, const AttackState& state,
                                 const TargetSet& target);

AttackState targeted_step(const Predictor& model, const Vector& x, const AttackState& state,
                          const TargetSet& target, const AttackConfig& cfg);

/// Targeted attack. Runs max_iter steps (or stops early when
/// cfg.early_exit) and returns the smallest-norm iterate whose top-k equals
/// the target set; otherwise the last iterate with success = false.
AttackResult attack_targeted(const Predictor& model, const Vector& x, const TargetSet& target,
                             const AttackConfig& cfg);

/// hinge(max_{j not in P} f_j - min_{j in P} f_j).
double mlap_targeted_loss(const ScoreVector& scores, const TargetSet& target);

/// Subgradient of mlap_targeted_loss(F(x + z)): J_{argmax non-target} -
/// J_{argmin target} when the loss is positive, zero otherwise.
Vector mlap_subgradient(const Predictor& model, const Vector& x, const Vector& z,
                        const TargetSet& target);

/// Same loop shell as attack_targeted, descending the ML-AP loss.
AttackResult attack_mlap(const Predictor& model, const Vector& x, const TargetSet& target,
                         const AttackConfig& cfg);

/// Universal untargeted attack. Sweeps the dataset in index order; every
/// instance still label-consistent at x_i + z gets an unprojected
/// instance-specific attack from x_i + z, and z <- project_l2(z + dz, eps).
/// Stops once UASR >= xi or after max_epochs sweeps.
UniversalResult attack_universal(const Predictor& model, const Dataset& data,
                                 const AttackConfig& cfg, double xi = 0.7, int max_epochs = 20);

}  // namespace tkml
