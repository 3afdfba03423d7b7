#include "smlab/upo.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "oracles.hpp"
#include "smlab/rng.hpp"

namespace smlab {
namespace {

TEST(Upo, EmptyBeforeFirstRealization) {
  UpoAccumulator acc(2, 2);
  EXPECT_FALSE(acc.plain_mean(0, 0).has_value());
  EXPECT_FALSE(acc.bias(0, 0).has_value());
  EXPECT_EQ(acc.max_bias(), 0.0);
  EXPECT_TRUE(acc.weight_identity_holds());
}

TEST(Upo, SingleSelectionHasNoBias) {
  UpoAccumulator acc(2, 2);
  acc.on_selection(1, 0, 0.7);
  EXPECT_EQ(acc.weight_sum(1, 0), 1);
  EXPECT_EQ(acc.pending_weight(0, 0), 1);  // offered but not yet consumed
  EXPECT_EQ(acc.pending_weight(0, 1), 0);
  EXPECT_DOUBLE_EQ(*acc.bias(1, 0), 0.0);
}

// Column j chosen twice with another row before (i,j) itself is played:
// the realized reward was offered three times.
TEST(Upo, WeightCountsWaitingVisits) {
  UpoAccumulator acc(2, 1);
  acc.on_selection(0, 0, 0.2);
  acc.on_selection(0, 0, 0.2);
  acc.on_selection(1, 0, 0.9);
  EXPECT_EQ(acc.weight_sum(1, 0), 3);
  EXPECT_EQ(acc.weight_sum(0, 0), 2);
  EXPECT_EQ(acc.pending_weight(0, 0), 1);
  EXPECT_TRUE(acc.weight_identity_holds());
}

// The I node of the scripted counterexample: pattern Y,X,X,Y with the J
// child returning 1,0,1,0 on successive Y visits. Weights go 1,3,1,3, so
// the weighted average of Y is 1/4 while the plain one is 1/2.
TEST(Upo, CounterexamplePattern) {
  UpoAccumulator acc(2, 1);
  const int pattern[] = {1, 0, 0, 1};
  int y_visits = 0;
  for (int t = 0; t < 4000; ++t) {
    const int i = pattern[t % 4];
    const double x = i == 1 ? (y_visits++ % 2 == 0 ? 1.0 : 0.0) : 0.0;
    acc.on_selection(i, 0, x);
    if ((t + 1) % 4 == 0) {
      EXPECT_DOUBLE_EQ(*acc.plain_mean(1, 0), 0.5);
      EXPECT_DOUBLE_EQ(*acc.weighted_mean(1, 0), 0.25);
      EXPECT_DOUBLE_EQ(*acc.bias(1, 0), 0.25);
    }
  }
  EXPECT_DOUBLE_EQ(acc.max_bias(), 0.25);
  EXPECT_TRUE(acc.weight_identity_holds());
  const auto series = acc.bias_series(1, 0);
  ASSERT_FALSE(series.empty());
  EXPECT_EQ(series.front().first, 1);
  EXPECT_DOUBLE_EQ(series.back().second, 0.25);
}

TEST(Upo, ConstantRewardsHaveNoBias) {
  UpoAccumulator acc(3, 2);
  Rng rng(1);
  for (int t = 0; t < 5000; ++t) {
    acc.on_selection(static_cast<int>(rng.below(3)), static_cast<int>(rng.below(2)), 0.4);
  }
  EXPECT_NEAR(acc.max_bias(), 0.0, 1e-12);
}

// Incremental bookkeeping against weights counted from their definition on
// skewed random traces.
TEST(Upo, MatchesDefinitionOnRandomTraces) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Rng rng(seed);
    const int rows = 2 + static_cast<int>(rng.below(2));
    const int cols = 1 + static_cast<int>(rng.below(3));
    UpoAccumulator acc(rows, cols);
    std::vector<oracle::TraceVisit> trace;
    for (int t = 0; t < 3000; ++t) {
      // Row 0 dominates early and fades, so weights are uneven.
      const int i = rng.uniform() < 0.8 - 0.6 * t / 3000.0
                        ? 0
                        : static_cast<int>(rng.below(static_cast<std::uint32_t>(rows)));
      const int j = static_cast<int>(rng.below(static_cast<std::uint32_t>(cols)));
      const double x = rng.uniform() * (t % 7 == 0 ? 1.0 : 0.3);
      acc.on_selection(i, j, x);
      trace.push_back({i, j, x});
      ASSERT_TRUE(acc.weight_identity_holds());
    }
    for (int i = 0; i < rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        const auto ref = oracle::upo_from_definition(trace, i, j);
        ASSERT_EQ(acc.realized(i, j), ref.n);
        if (ref.n == 0) continue;
        std::int64_t wsum = 0;
        for (auto w : ref.weights) wsum += w;
        EXPECT_EQ(acc.weight_sum(i, j), wsum);
        EXPECT_NEAR(*acc.plain_mean(i, j), ref.plain, 1e-12);
        EXPECT_NEAR(*acc.weighted_mean(i, j), ref.weighted, 1e-12);
      }
    }
  }
}

TEST(Upo, SeriesLoggedAtPowersOfTwo) {
  UpoAccumulator acc(1, 1);
  for (int t = 0; t < 100; ++t) acc.on_selection(0, 0, 0.5);
  std::vector<std::int64_t> ns;
  for (const auto& [n, b] : acc.bias_series(0, 0)) ns.push_back(n);
  EXPECT_EQ(ns, (std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64}));
}

TEST(SuffixMaxBias, Ranges) {
  const std::vector<double> s{0.5, 0.1, 0.3, 0.2};
  EXPECT_DOUBLE_EQ(*suffix_max_bias(s, 0), 0.5);
  EXPECT_DOUBLE_EQ(*suffix_max_bias(s, 1), 0.3);
  EXPECT_DOUBLE_EQ(*suffix_max_bias(s, 3), 0.2);
  EXPECT_FALSE(suffix_max_bias(s, 4).has_value());
}

}  // namespace
}  // namespace smlab
