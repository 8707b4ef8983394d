#include "tkml/attacks.hpp"
#include "tkml/dataset.hpp"
#include "tkml/errors.hpp"
#include "tkml/evaluation.hpp"
#include "tkml/predictor.hpp"

namespace tkml {

UniversalResult attack_universal(const Predictor& model, const Dataset& data,
                                 const AttackConfig& cfg, double xi, int max_epochs) {
  cfg.validate(model.num_labels());
  if (data.empty()) throw ParameterError("universal attack needs a non-empty dataset");
  if (!(xi > 0.0 && xi <= 1.0)) throw ParameterError("xi must lie in (0, 1]");
  if (max_epochs < 1) throw ParameterError("max_epochs must be at least 1");
  if (!cfg.projection) throw ParameterError("universal attack requires a projection radius");
  if (data.input_dim() != model.input_dim() || data.num_labels() != model.num_labels()) {
    throw ShapeError("dataset shape does not match the model");
  }

  // The per-instance search runs unprojected; only the shared z is projected.
  AttackConfig inner = cfg;
  inner.projection = false;

  Vector z = Vector::Zero(data.input_dim());
  double rate = uasr(model, data, z, cfg.k, cfg.clip_low, cfg.clip_high);
  int epochs = 0;
  while (rate < xi && epochs < max_epochs) {
    ++epochs;
    for (const auto& inst : data.instances()) {
      const Vector shifted = clip_to_box(inst.x + z, cfg.clip_low, cfg.clip_high);
      if (consistency_at(inst.truth, model.predict(shifted), cfg.k) == 0) continue;
      const AttackResult step = attack_untargeted(model, shifted, inst.truth, inner);
      z = project_l2(z + step.perturbation.z, cfg.epsilon);
    }
    rate = uasr(model, data, z, cfg.k, cfg.clip_low, cfg.clip_high);
  }

  UniversalResult result;
  result.z = Perturbation::of(std::move(z));
  result.training_uasr = rate;
  result.epochs_used = epochs;
  result.reached_epoch_cap = rate < xi;
  return result;
}

}  // namespace tkml
