#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "test_support.hpp"
#include "tkml/errors.hpp"
#include "tkml/topk_math.hpp"

namespace tkml {
namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

TEST(Hinge, Branches) {
  EXPECT_DOUBLE_EQ(hinge(0.5), 0.5);
  EXPECT_DOUBLE_EQ(hinge(-0.3), 0.0);
  EXPECT_DOUBLE_EQ(hinge(0.0), 0.0);
}

TEST(RankDesc, SortsDescending) {
  const RankedScores r = rank_desc(vec({0.1, 0.9, 0.5}));
  EXPECT_EQ(r.sorted_values, (std::vector<double>{0.9, 0.5, 0.1}));
  EXPECT_EQ(r.sorted_indices, (std::vector<int>{1, 2, 0}));
}

TEST(RankDesc, TiesKeepAscendingIndex) {
  EXPECT_EQ(rank_desc(vec({0.5, 0.5, 0.1})).sorted_indices, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(rank_desc(vec({0.2, 0.2, 0.2})).sorted_indices, (std::vector<int>{0, 1, 2}));
  EXPECT_EQ(rank_desc(vec({0.1, 0.7, 0.3, 0.7})).sorted_indices, (std::vector<int>{1, 3, 2, 0}));
}

TEST(RankDesc, RejectsNonFinite) {
  EXPECT_THROW(rank_desc(vec({0.1, std::numeric_limits<double>::quiet_NaN()})), InvalidInputError);
  EXPECT_THROW(rank_desc(vec({std::numeric_limits<double>::infinity(), 0.3})), InvalidInputError);
}

TEST(RankDesc, IndicesFormPermutationThatSortsTheInput) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    // Coarse values force plenty of ties.
    Vector v = testing::random_scores(rng, 15);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::round(v[i] * 4.0) / 4.0;
    const RankedScores r = rank_desc(v);
    std::vector<int> seen = r.sorted_indices;
    std::sort(seen.begin(), seen.end());
    std::vector<int> expect(15);
    std::iota(expect.begin(), expect.end(), 0);
    ASSERT_EQ(seen, expect);
    for (std::size_t j = 0; j < r.sorted_indices.size(); ++j) {
      ASSERT_EQ(r.sorted_values[j], v[r.sorted_indices[j]]);
      if (j > 0) {
        ASSERT_GE(r.sorted_values[j - 1], r.sorted_values[j]);
        if (r.sorted_values[j - 1] == r.sorted_values[j]) {
          ASSERT_LT(r.sorted_indices[j - 1], r.sorted_indices[j]);
        }
      }
    }
  }
}

TEST(TopKSum, HandValues) {
  EXPECT_DOUBLE_EQ(top_k_sum(vec({0.9, 0.5, 0.1}), 2), 1.4);
  EXPECT_DOUBLE_EQ(top_k_sum(vec({0.9, 0.5, 0.1}), 3), 1.5);
}

TEST(TopKSum, MatchesSortOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const Vector v = testing::random_scores(rng, 20);
    EXPECT_NEAR(top_k_sum(v, 7), testing::brute_top_k_sum(v, 7), 1e-14);
  }
}

TEST(TopKSum, KOutOfRange) {
  EXPECT_THROW(top_k_sum(vec({0.9, 0.5, 0.1}), 0), ParameterError);
  EXPECT_THROW(top_k_sum(vec({0.9, 0.5, 0.1}), 4), ParameterError);
  EXPECT_THROW(avg_top_k(vec({0.9, 0.5, 0.1}), 0), ParameterError);
  EXPECT_THROW(optimal_lambda(vec({0.9, 0.5, 0.1}), 4), ParameterError);
}

TEST(AvgTopK, HandValues) {
  EXPECT_DOUBLE_EQ(avg_top_k(vec({0.9, 0.5, 0.1}), 2), 0.7);
  const Vector flat = Vector::Constant(6, 0.37);
  for (int k = 1; k <= 6; ++k) EXPECT_DOUBLE_EQ(avg_top_k(flat, k), 0.37);
}

TEST(AvgTopK, UpperBoundsKthLargest) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector v = testing::random_scores(rng, 12);
    for (int k = 1; k <= 12; ++k) {
      ASSERT_GE(avg_top_k(v, k), testing::brute_kth_largest(v, k) - 1e-15);
    }
  }
}

TEST(AvgTopK, TightWhenLeadingValuesEqual) {
  const Vector v = vec({0.6, 0.2, 0.6, 0.6, 0.1});
  EXPECT_DOUBLE_EQ(avg_top_k(v, 3), 0.6);
  EXPECT_DOUBLE_EQ(avg_top_k(v, 3), optimal_lambda(v, 3));
}

TEST(AvgTopKVariational, HandValue) {
  // (2 * 0.5 + 0.4 + 0 + 0) / 2
  EXPECT_NEAR(avg_top_k_variational(vec({0.9, 0.5, 0.1}), 2, 0.5), 0.7, 1e-15);
}

TEST(AvgTopKVariational, ZeroThresholdWithFullKIsMean) {
  std::mt19937_64 rng(8);
  const Vector v = testing::random_scores(rng, 9);
  EXPECT_NEAR(avg_top_k_variational(v, 9, 0.0), v.mean(), 1e-15);
}

TEST(AvgTopKVariational, UnitThresholdBoundsTheGridMinimum) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    const Vector v = testing::random_scores(rng, 10) * 0.999;
    const double at_one = avg_top_k_variational(v, 4, 1.0);
    EXPECT_DOUBLE_EQ(at_one, 1.0);
    EXPECT_GE(at_one, testing::grid_min_variational(v, 4, 1e-3));
    EXPECT_GE(at_one, avg_top_k(v, 4));
  }
}

TEST(AvgTopKVariational, LambdaOutsideUnitInterval) {
  EXPECT_THROW(avg_top_k_variational(vec({0.9, 0.5}), 1, -0.01), ParameterError);
  EXPECT_THROW(avg_top_k_variational(vec({0.9, 0.5}), 1, 1.01), ParameterError);
  EXPECT_THROW(avg_top_k_variational(vec({0.9, 0.5}), 1, std::nan("")), ParameterError);
}

TEST(OptimalLambda, HandValues) {
  EXPECT_DOUBLE_EQ(optimal_lambda(vec({0.9, 0.5, 0.1}), 2), 0.5);
  EXPECT_DOUBLE_EQ(optimal_lambda(vec({0.9, 0.5, 0.1}), 1), 0.9);
}

TEST(OptimalLambda, GridSearchFindsNothingLower) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector v = testing::random_scores(rng, 20);
    const double at_opt = avg_top_k_variational(v, 5, optimal_lambda(v, 5));
    EXPECT_GE(testing::grid_min_variational(v, 5, 1e-4), at_opt - 1e-12);
    EXPECT_NEAR(testing::grid_min_variational(v, 5, 1e-4), at_opt, 1e-6);
  }
}

TEST(TopKProperties, VariationalMinimumEqualsAverageTopK) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 300; ++trial) {
    const int m = 2 + static_cast<int>(rng() % 30);
    const Vector v = testing::random_scores(rng, m);
    const int k = 1 + static_cast<int>(rng() % static_cast<unsigned>(m));
    const double direct = avg_top_k(v, k);
    const double variational = avg_top_k_variational(v, k, optimal_lambda(v, k));
    ASSERT_LE(std::abs(direct - variational), 1e-12 * std::max(1.0, std::abs(direct)));
    for (int g = 0; g <= 100; ++g) {
      ASSERT_GE(avg_top_k_variational(v, k, g / 100.0), direct - 1e-12);
    }
  }
}

TEST(TopKProperties, DoubleHingeCollapses) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 2.0);
  std::exponential_distribution<double> e(1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double a = g(rng);
    const double x = g(rng);
    const double lambda = trial % 10 == 0 ? 0.0 : e(rng);
    ASSERT_EQ(hinge(hinge(a - x) - lambda), hinge(a - x - lambda));
  }
}

}  // namespace
}  // namespace tkml
