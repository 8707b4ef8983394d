#include "tkml/topk_math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tkml/errors.hpp"

namespace tkml {
namespace {

void check_k(const ScoreVector& scores, int k) {
  if (k < 1 || k > scores.size()) {
    throw ParameterError("k must lie in [1, " + std::to_string(scores.size()) + "], got " +
                         std::to_string(k));
  }
}

}  // namespace

RankedScores rank_desc(const ScoreVector& scores) {
  const auto m = static_cast<std::size_t>(scores.size());
  for (Eigen::Index i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) {
      throw InvalidInputError("score " + std::to_string(i) + " is not finite");
    }
  }
  RankedScores ranked;
  ranked.sorted_indices.resize(m);
  std::iota(ranked.sorted_indices.begin(), ranked.sorted_indices.end(), 0);
  std::stable_sort(ranked.sorted_indices.begin(), ranked.sorted_indices.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  ranked.sorted_values.reserve(m);
  for (int idx : ranked.sorted_indices) ranked.sorted_values.push_back(scores[idx]);
  return ranked;
}

double top_k_sum(const ScoreVector& scores, int k) {
  check_k(scores, k);
  const RankedScores ranked = rank_desc(scores);
  return std::accumulate(ranked.sorted_values.begin(), ranked.sorted_values.begin() + k, 0.0);
}

double avg_top_k(const ScoreVector& scores, int k) { return top_k_sum(scores, k) / k; }

double avg_top_k_variational(const ScoreVector& scores, int k, double lambda) {
  check_k(scores, k);
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ParameterError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  }
  double total = k * lambda;
  for (Eigen::Index j = 0; j < scores.size(); ++j) total += hinge(scores[j] - lambda);
  return total / k;
}

double optimal_lambda(const ScoreVector& scores, int k) {
  check_k(scores, k);
  return rank_desc(scores).sorted_values[static_cast<std::size_t>(k - 1)];
}

}  // namespace tkml
