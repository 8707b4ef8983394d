#pragma once

#include <vector>

#include <Eigen/Core>

namespace tkml {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Calibrated per-label scores for one instance, entries in [0, 1].
using ScoreVector = Eigen::VectorXd;

/// Scores sorted in descending order together with the originating label
/// indices. Equal scores keep ascending index order.
struct RankedScores {
  std::vector<double> sorted_values;
  std::vector<int> sorted_indices;
};

/// max(0, a).
inline double hinge(double a) noexcept { return a > 0.0 ? a : 0.0; }

/// Stable descending sort. Throws InvalidInputError on non-finite entries.
RankedScores rank_desc(const ScoreVector& scores);

/// Sum of the k largest entries. Requires 1 <= k <= m.
double top_k_sum(const ScoreVector& scores, int k);

/// Average of the k largest entries; an upper bound on the k-th largest.
double avg_top_k(const ScoreVector& scores, int k);

/// Variational form of the average top-k at a fixed threshold:
///
///   (1/k) * (k * lambda + sum_j hinge(f_j - lambda))
///
/// Its minimum over lambda in [0, 1] is avg_top_k(scores, k) for calibrated
/// scores, attained at the k-th largest score.
double avg_top_k_variational(const ScoreVector& scores, int k, double lambda);

/// The minimising threshold of avg_top_k_variational, i.e. the k-th largest score.
double optimal_lambda(const ScoreVector& scores, int k);

}  // namespace tkml
