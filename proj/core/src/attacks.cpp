#include "tkml/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tkml/errors.hpp"
#include "tkml/evaluation.hpp"
#include "tkml/predictor.hpp"

namespace tkml {
namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
}

void check_rank_cutoff(int k, Eigen::Index m) {
  if (k < 1 || k > m - 1) {
    throw ParameterError("k must lie in [1, m - 1], got k = " + std::to_string(k) + " with m = " +
                         std::to_string(m));
  }
}

// argmax over the true labels; the first (smallest) index wins ties.
int strongest_true_label(const ScoreVector& scores, const LabelSet& truth) {
  if (truth.empty()) throw ParameterError("ground-truth label set is empty");
  int best = truth.indices().front();
  for (int y : truth.indices()) {
    if (scores[y] > scores[best]) best = y;
  }
  return best;
}

// Descent update shared by every attack, followed by the feasibility maps.
AttackState apply_update(const Vector& x, const AttackState& state, const Vector& dz,
                         double dlambda, const AttackConfig& cfg) {
  AttackState next;
  next.z = (1.0 - cfg.beta * cfg.eta) * state.z - cfg.eta * dz;
  next.lambda = std::clamp(state.lambda - cfg.eta * dlambda, 0.0, 1.0);
  if (cfg.projection) next.z = project_l2(next.z, cfg.epsilon);
  next.z = clip_to_box(x + next.z, cfg.clip_low, cfg.clip_high) - x;
  return next;
}

bool hits_target(const ScoreVector& scores, const TargetSet& target) {
  return top_k_set(scores, target.k()) == target.labels();
}

void check_target(const Predictor& model, const TargetSet& target) {
  if (target.num_labels() != model.num_labels()) {
    throw ParameterError("target set does not match the model's label count");
  }
}

template <typename Step>
AttackResult run_targeted_loop(const Predictor& model, const Vector& x, const TargetSet& target,
                               const AttackConfig& cfg, Step&& step) {
  cfg.validate(model.num_labels());
  check_target(model, target);
  if (target.k() != cfg.k) throw ParameterError("target set size differs from cfg.k");

  AttackState state{Vector::Zero(x.size()), 0.0};
  ScoreVector scores = model.predict(x);

  AttackResult best;
  bool have_best = false;
  auto consider = [&]() {
    if (!hits_target(scores, target)) return;
    const double norm = state.z.norm();
    if (!have_best || norm < best.perturbation.l2_norm) {
      best.success = true;
      best.perturbation = Perturbation::of(state.z);
      best.final_scores = scores;
      best.final_lambda = state.lambda;
      have_best = true;
    }
  };

  consider();
  int iterations = 0;
  while (iterations < cfg.max_iter && !(cfg.early_exit && have_best)) {
    state = step(state);
    ++iterations;
    scores = model.predict(x + state.z);
    consider();
  }

  if (have_best) {
    best.iterations_used = iterations;
    return best;
  }
  AttackResult last;
  last.success = false;
  last.perturbation = Perturbation::of(state.z);
  last.iterations_used = iterations;
  last.final_scores = scores;
  last.final_lambda = state.lambda;
  return last;
}

}  // namespace

AttackConfig AttackConfig::untargeted_defaults() { return AttackConfig{}; }

AttackConfig AttackConfig::targeted_defaults() {
  AttackConfig cfg;
  cfg.epsilon = 2.0;
  return cfg;
}

AttackConfig AttackConfig::universal_defaults() {
  AttackConfig cfg;
  cfg.epsilon = 100.0;
  return cfg;
}

void AttackConfig::validate(int num_labels) const {
  check_rank_cutoff(k, num_labels);
  if (!(eta > 0.0)) throw ParameterError("eta must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be at least 1");
  if (!(beta >= 0.0)) throw ParameterError("beta must be non-negative");
  if (projection && !(epsilon > 0.0)) throw ParameterError("epsilon must be positive");
  if (!(clip_low < clip_high)) throw ParameterError("clip_low must be below clip_high");
}

Perturbation Perturbation::of(Vector z) {
  Perturbation p;
  p.l2_norm = z.norm();
  p.z = std::move(z);
  return p;
}

Vector project_l2(const Vector& z, double epsilon) {
  if (!(epsilon > 0.0)) throw ParameterError("projection radius must be positive");
  const double norm = z.norm();
  if (norm <= epsilon) return z;
  Vector out = z * (epsilon / norm);
  // Rounding can leave the scaled norm one ulp above the radius.
  while (out.norm() > epsilon) out *= std::nextafter(1.0, 0.0);
  return out;
}

double untargeted_loss(const ScoreVector& scores, const LabelSet& truth, int k, double lambda) {
  check_rank_cutoff(k, scores.size());
  check_lambda(lambda);
  const int m = static_cast<int>(scores.size());
  const double top_true = scores[strongest_true_label(scores, truth)];
  double sum = 0.0;
  for (int j = 0; j < m; ++j) sum += hinge(top_true - scores[j] - lambda);
  return lambda + sum / (m - k);
}

Subgradient untargeted_subgradient(const Predictor& model, const Vector& x, const AttackState& state,
                                   const LabelSet& truth, int k) {
  const int m = model.num_labels();
  check_rank_cutoff(k, m);
  const Vector point = x + state.z;
  const ScoreVector scores = model.predict(point);
  const Matrix jac = model.input_jacobian(point);
  const int anchor = strongest_true_label(scores, truth);

  Subgradient g{Vector::Zero(x.size()), 0.0};
  int active = 0;
  for (int j = 0; j < m; ++j) {
    if (scores[anchor] - scores[j] > state.lambda) {
      g.dz -= jac.row(j).transpose();
      ++active;
    }
  }
  g.dz += active * jac.row(anchor).transpose();
  g.dz /= (m - k);
  g.dlambda = 1.0 - static_cast<double>(active) / (m - k);
  return g;
}

AttackState untargeted_step(const Predictor& model, const Vector& x, const AttackState& state,
                            const LabelSet& truth, const AttackConfig& cfg) {
  const Subgradient g = untargeted_subgradient(model, x, state, truth, cfg.k);
  return apply_update(x, state, g.dz, g.dlambda, cfg);
}

AttackResult attack_untargeted(const Predictor& model, const Vector& x, const LabelSet& truth,
                               const AttackConfig& cfg) {
  cfg.validate(model.num_labels());
  if (truth.empty()) throw ParameterError("ground-truth label set is empty");
  if (truth.num_labels() != model.num_labels()) {
    throw ParameterError("truth set does not match the model's label count");
  }

  AttackState state{Vector::Zero(x.size()), 0.0};
  ScoreVector scores = model.predict(x);
  int iterations = 0;
  while (consistency_at(truth, scores, cfg.k) != 0 && iterations < cfg.max_iter) {
    state = untargeted_step(model, x, state, truth, cfg);
    ++iterations;
    scores = model.predict(x + state.z);
  }

  AttackResult result;
  result.success = consistency_at(truth, scores, cfg.k) == 0;
  result.perturbation = Perturbation::of(std::move(state.z));
  result.iterations_used = iterations;
  result.final_scores = std::move(scores);
  result.final_lambda = state.lambda;
  return result;
}

double targeted_loss(const ScoreVector& scores, const TargetSet& target, double lambda) {
  check_lambda(lambda);
  if (target.num_labels() != scores.size()) {
    throw ParameterError("target set does not match the score vector");
  }
  double sum = 0.0;
  for (int j = 0; j < scores.size(); ++j) sum += hinge(target.sign(j) * (lambda - scores[j]));
  return sum;
}

Subgradient targeted_subgradient(const Predictor& model, const Vector& x, const AttackState& state,
                                 const TargetSet& target) {
  check_target(model, target);
  const Vector point = x + state.z;
  const ScoreVector scores = model.predict(point);
  const Matrix jac = model.input_jacobian(point);

  Subgradient g{Vector::Zero(x.size()), 0.0};
  for (int j = 0; j < scores.size(); ++j) {
    const double s = target.sign(j);
    if (s * (state.lambda - scores[j]) > 0.0) {
      g.dz -= s * jac.row(j).transpose();
      g.dlambda += s;
    }
  }
  return g;
}

AttackState targeted_step(const Predictor& model, const Vector& x, const AttackState& state,
                          const TargetSet& target, const AttackConfig& cfg) {
  const Subgradient g = targeted_subgradient(model, x, state, target);
  return apply_update(x, state, g.dz, g.dlambda, cfg);
}

AttackResult attack_targeted(const Predictor& model, const Vector& x, const TargetSet& target,
                             const AttackConfig& cfg) {
  return run_targeted_loop(model, x, target, cfg, [&](const AttackState& state) {
    return targeted_step(model, x, state, target, cfg);
  });
}

double mlap_targeted_loss(const ScoreVector& scores, const TargetSet& target) {
  if (target.num_labels() != scores.size()) {
    throw ParameterError("target set does not match the score vector");
  }
  double max_other = -std::numeric_limits<double>::infinity();
  double min_target = std::numeric_limits<double>::infinity();
  for (int j = 0; j < scores.size(); ++j) {
    if (target.contains(j)) {
      min_target = std::min(min_target, scores[j]);
    } else {
      max_other = std::max(max_other, scores[j]);
    }
  }
  return hinge(max_other - min_target);
}

Vector mlap_subgradient(const Predictor& model, const Vector& x, const Vector& z,
                        const TargetSet& target) {
  check_target(model, target);
  const Vector point = x + z;
  const ScoreVector scores = model.predict(point);
  int top_other = -1;
  int weakest_target = -1;
  for (int j = 0; j < scores.size(); ++j) {
    if (target.contains(j)) {
      if (weakest_target < 0 || scores[j] < scores[weakest_target]) weakest_target = j;
    } else {
      if (top_other < 0 || scores[j] > scores[top_other]) top_other = j;
    }
  }
  if (top_other < 0 || weakest_target < 0 || !(scores[top_other] - scores[weakest_target] > 0.0)) {
    return Vector::Zero(x.size());
  }
  const Matrix jac = model.input_jacobian(point);
  return (jac.row(top_other) - jac.row(weakest_target)).transpose();
}

AttackResult attack_mlap(const Predictor& model, const Vector& x, const TargetSet& target,
                         const AttackConfig& cfg) {
  return run_targeted_loop(model, x, target, cfg, [&](const AttackState& state) {
    const Vector g = mlap_subgradient(model, x, state.z, target);
    return apply_update(x, state, g, 0.0, cfg);
  });
}

}  // namespace tkml
