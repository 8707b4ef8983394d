#include <benchmark/benchmark.h>

#include <random>

#include "tkml/tkml.hpp"

namespace {

using namespace tkml;

Vector uniform_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

void BM_AvgTopK(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const Vector f = uniform_vector(rng, static_cast<int>(state.range(0)), 0, 1);
  const int k = static_cast<int>(state.range(0) / 4);
  for (auto _ : state) benchmark::DoNotOptimize(avg_top_k(f, k));
}
BENCHMARK(BM_AvgTopK)->Arg(20)->Arg(80)->Arg(1000);

void BM_TopKSet(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const Vector f = uniform_vector(rng, static_cast<int>(state.range(0)), 0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(top_k_set(f, 3));
}
BENCHMARK(BM_TopKSet)->Arg(20)->Arg(80)->Arg(1000);

void BM_InputJacobian(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const MlpModel model = MlpModel::initialize(d, {64}, 10, Activation::kTanh, 3);
  std::mt19937_64 rng(3);
  const Vector x = uniform_vector(rng, d, -1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(model.input_jacobian(x));
}
BENCHMARK(BM_InputJacobian)->Arg(20)->Arg(256);

void BM_UntargetedStep(benchmark::State& state) {
  const MlpModel model = MlpModel::initialize(20, {64}, 10, Activation::kTanh, 4);
  std::mt19937_64 rng(4);
  const Vector x = uniform_vector(rng, 20, -1, 1);
  const LabelSet truth(10, {0, 4});
  AttackConfig cfg;
  AttackState s{Vector::Zero(20), 0.0};
  for (auto _ : state) {
    s = untargeted_step(model, x, s, truth, cfg);
    benchmark::DoNotOptimize(s.z.data());
  }
}
BENCHMARK(BM_UntargetedStep);

void BM_TargetedAttack(benchmark::State& state) {
  const MlpModel model = MlpModel::initialize(20, {64}, 10, Activation::kTanh, 5);
  std::mt19937_64 rng(5);
  const Vector x = uniform_vector(rng, 20, -1, 1);
  const ScoreVector f = model.predict(x);
  const LabelSet truth = top_k_set(f, 1);
  const TargetSet target = select_targets(f, truth, 3, TargetStrategy::kWorst);
  AttackConfig cfg = AttackConfig::targeted_defaults();
  cfg.max_iter = 200;
  for (auto _ : state) benchmark::DoNotOptimize(attack_targeted(model, x, target, cfg).success);
}
BENCHMARK(BM_TargetedAttack)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
