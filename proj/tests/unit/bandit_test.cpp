#include "smlab/bandit.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "smlab/rng.hpp"

namespace smlab {
namespace {

void expect_distribution(std::span<const double> d, double floor) {
  double total = 0.0;
  for (double p : d) {
    EXPECT_GE(p, floor - 1e-15);
    total += p;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

// Property: every emitted distribution is a distribution with the gamma/K
// floor, whatever rewards arrive.
TEST(Bandit, EmittedDistributionsCarryFloor) {
  for (int algo = 0; algo < 2; ++algo) {
    for (int k : {1, 2, 3, 7}) {
      const double gamma = 0.15;
      std::unique_ptr<SelectionPolicy> p;
      if (algo == 0) p = std::make_unique<Exp3Policy>(k, gamma);
      else p = std::make_unique<RmPolicy>(k, gamma);
      Rng rng(k * 10 + algo);
      Rng rewards(77);
      for (int t = 0; t < 5000; ++t) {
        const Selection s = p->select(rng);
        ASSERT_GE(s.action, 0);
        ASSERT_LT(s.action, k);
        expect_distribution(s.distribution, gamma / k);
        p->update(s.action, rewards.uniform());
      }
      expect_distribution(p->current_mixed(), gamma / k);
      EXPECT_EQ(p->exploration(), gamma);
    }
  }
}

TEST(Exp3, InitialDistributionUniform) {
  Exp3Policy p(4, 0.2);
  for (double x : p.current_mixed()) EXPECT_DOUBLE_EQ(x, 0.25);
}

TEST(Exp3, UpdateAddsImportanceWeightedReward) {
  Exp3Policy p(2, 0.2);
  Rng rng(1);
  const Selection s = p.select(rng);
  const double prob = s.distribution[s.action];
  p.update(s.action, 0.6);
  EXPECT_DOUBLE_EQ(p.state().estimates[s.action], 0.6 / prob);
  EXPECT_DOUBLE_EQ(p.state().estimates[1 - s.action], 0.0);
}

TEST(Exp3, SoftmaxOfScaledEstimates) {
  Exp3State st(3, 0.3);
  st.estimates = {10.0, 0.0, -5.0};
  std::vector<double> exploit(3), mixed(3);
  exp3_distribution(st, exploit, mixed);
  const double eta = 0.1;
  const double z = std::exp(eta * 10) + 1 + std::exp(-eta * 5);
  EXPECT_NEAR(exploit[0], std::exp(eta * 10) / z, 1e-12);
  EXPECT_NEAR(mixed[2], 0.7 * std::exp(-eta * 5) / z + 0.1, 1e-12);
}

TEST(Exp3, LargeEstimatesStayFinite) {
  Exp3State st(2, 0.1);
  st.estimates = {1e9, 0.0};
  std::vector<double> exploit(2), mixed(2);
  exp3_distribution(st, exploit, mixed);
  EXPECT_NEAR(mixed[0], 0.95, 1e-12);
  EXPECT_NEAR(mixed[1], 0.05, 1e-12);
}

// Draw frequencies match the emitted distribution, and explored draws
// happen at rate gamma.
TEST(Exp3, SamplingMatchesDistribution) {
  Exp3State st(3, 0.2);
  st.estimates = {15.0, 5.0, 0.0};
  std::vector<double> exploit, mixed;
  Rng rng(5);
  const int n = 300000;
  std::vector<int> hist(3, 0);
  int explored = 0;
  for (int t = 0; t < n; ++t) {
    const Selection s = exp3_select(st, rng, exploit, mixed);
    ++hist[s.action];
    explored += s.explored;
  }
  for (int a = 0; a < 3; ++a) EXPECT_NEAR(hist[a] / double(n), mixed[a], 0.004);
  EXPECT_NEAR(explored / double(n), 0.2, 0.004);
}

TEST(Rm, UniformWithoutPositiveRegret) {
  RmState st(3, 0.1);
  st.regrets = {-1.0, 0.0, -2.0};
  std::vector<double> exploit(3), mixed(3);
  rm_distribution(st, exploit, mixed);
  for (double x : exploit) EXPECT_DOUBLE_EQ(x, 1.0 / 3);
}

TEST(Rm, ProportionalToPositiveRegret) {
  RmState st(3, 0.1);
  st.regrets = {3.0, 1.0, -2.0};
  std::vector<double> exploit(3), mixed(3);
  rm_distribution(st, exploit, mixed);
  EXPECT_DOUBLE_EQ(exploit[0], 0.75);
  EXPECT_DOUBLE_EQ(exploit[1], 0.25);
  EXPECT_DOUBLE_EQ(exploit[2], 0.0);
  EXPECT_NEAR(mixed[2], 0.1 / 3, 1e-15);
}

// Regrets move by the unbiased estimate: every action loses r, the played
// one gains r / mu(a).
TEST(Rm, UpdateRule) {
  RmState st(2, 0.2);
  const std::vector<double> dist{0.25, 0.75};
  rm_update(st, 1, 0.6, dist);
  EXPECT_DOUBLE_EQ(st.regrets[0], -0.6);
  EXPECT_DOUBLE_EQ(st.regrets[1], -0.6 + 0.6 / 0.75);
}

// Against a fixed reward vector, regret matching concentrates on the best arm.
TEST(Rm, ConvergesOnStochasticBandit) {
  RmPolicy p(3, 0.1);
  Rng rng(2);
  Rng env(3);
  const double means[] = {0.2, 0.7, 0.4};
  std::vector<int> hist(3, 0);
  for (int t = 0; t < 100000; ++t) {
    const Selection s = p.select(rng);
    ++hist[s.action];
    p.update(s.action, env.bernoulli(means[s.action]) ? 1.0 : 0.0);
  }
  EXPECT_GT(hist[1], 80000);
}

// External regret against a fully drawn table of Bernoulli arm rewards, of
// which the learner only sees its own column.
TEST(Bandit, NoRegretAgainstStochasticArms) {
  const double gamma = 0.1;
  const double means[] = {0.3, 0.6, 0.5};
  for (int algo = 0; algo < 2; ++algo) {
    std::unique_ptr<SelectionPolicy> p;
    if (algo == 0) p = std::make_unique<Exp3Policy>(3, gamma);
    else p = std::make_unique<RmPolicy>(3, gamma);
    Rng rng(10 + algo), env(20 + algo);
    const int n = 1000000;
    double totals[3] = {0, 0, 0};
    double got = 0.0;
    for (int t = 0; t < n; ++t) {
      double x[3];
      for (int a = 0; a < 3; ++a) totals[a] += x[a] = env.bernoulli(means[a]) ? 1.0 : 0.0;
      const Selection s = p->select(rng);
      got += x[s.action];
      p->update(s.action, x[s.action]);
    }
    const double best = std::max({totals[0], totals[1], totals[2]});
    EXPECT_LE((best - got) / n, gamma + 0.01) << p->name();
  }
}

TEST(Bandit, RejectsBadInput) {
  EXPECT_THROW(Exp3Policy(2, 0.0), std::invalid_argument);
  EXPECT_THROW(RmPolicy(2, 1.0), std::invalid_argument);
  EXPECT_THROW(RmPolicy(0, 0.1), std::invalid_argument);
  Exp3Policy p(2, 0.1);
  Rng rng(1);
  EXPECT_THROW(p.update(0, 0.5), std::logic_error);  // nothing selected
  const Selection s = p.select(rng);
  EXPECT_THROW(p.update(1 - s.action, 0.5), std::logic_error);
  EXPECT_THROW(p.update(s.action, 1.5), std::invalid_argument);
  EXPECT_THROW(p.update(s.action, -0.1), std::invalid_argument);
  EXPECT_NO_THROW(p.update(s.action, 0.5));  // a rejected update keeps the selection
}

TEST(Bandit, CloneIsIndependent) {
  RmPolicy p(2, 0.1);
  Rng rng(4);
  for (int t = 0; t < 10; ++t) {
    const auto s = p.select(rng);
    p.update(s.action, s.action == 0 ? 1.0 : 0.0);
  }
  auto copy = p.clone();
  const auto before = copy->current_mixed();
  for (int t = 0; t < 10; ++t) {
    const auto s = p.select(rng);
    p.update(s.action, s.action == 1 ? 1.0 : 0.0);
  }
  EXPECT_EQ(copy->current_mixed(), before);
}

TEST(Wrapper, AlwaysExploringLeavesInnerUntouched) {
  ExplorationWrapper w(std::make_unique<Exp3Policy>(3, 0.1), WrapperMode::kFixed, 1.0);
  Rng rng(6);
  for (int t = 0; t < 1000; ++t) {
    const Selection s = w.select(rng);
    EXPECT_TRUE(s.explored);
    for (double p : s.distribution) EXPECT_DOUBLE_EQ(p, 1.0 / 3);
    w.update(s.action, 1.0);
  }
  const auto& inner = dynamic_cast<const Exp3Policy&>(w.inner());
  for (double g : inner.state().estimates) EXPECT_EQ(g, 0.0);
  EXPECT_EQ(w.steps(), 1000);
}

TEST(Wrapper, EmittedDistributionMixesInner) {
  ExplorationWrapper w(std::make_unique<RmPolicy>(2, 0.1), WrapperMode::kFixed, 0.3);
  Rng rng(7);
  for (int t = 0; t < 2000; ++t) {
    const auto inner_mixed = w.inner().current_mixed();
    const Selection s = w.select(rng);
    for (int a = 0; a < 2; ++a) {
      EXPECT_NEAR(s.distribution[a], 0.7 * inner_mixed[a] + 0.15, 1e-12);
    }
    w.update(s.action, s.action == 0 ? 0.9 : 0.1);
  }
  EXPECT_NEAR(w.exploration(), 1 - 0.7 * 0.9, 1e-15);
}

TEST(Wrapper, SqrtSchedule) {
  ExplorationWrapper w(std::make_unique<Exp3Policy>(2, 0.1), WrapperMode::kSqrt);
  EXPECT_DOUBLE_EQ(w.exploration_probability(1), 1.0);
  EXPECT_DOUBLE_EQ(w.exploration_probability(4), 0.5);
  EXPECT_DOUBLE_EQ(w.exploration_probability(10000), 0.01);
  EXPECT_DOUBLE_EQ(w.exploration(), 0.1);
  Rng rng(8);
  int explored_late = 0;
  for (int t = 1; t <= 40000; ++t) {
    const Selection s = w.select(rng);
    if (t > 30000) explored_late += s.explored;
    w.update(s.action, 0.5);
  }
  // Late steps explore at roughly 1/sqrt(t) plus the inner's gamma.
  const double expect = 10000 * (1 / std::sqrt(35000.0) + 0.1 * (1 - 1 / std::sqrt(35000.0)));
  EXPECT_NEAR(explored_late, expect, 150);
}

TEST(Wrapper, RejectsBadSettings) {
  EXPECT_THROW(ExplorationWrapper(nullptr, WrapperMode::kFixed, 0.1), std::invalid_argument);
  EXPECT_THROW(ExplorationWrapper(std::make_unique<RmPolicy>(2, 0.1), WrapperMode::kNone),
               std::invalid_argument);
  EXPECT_THROW(
      ExplorationWrapper(std::make_unique<RmPolicy>(2, 0.1), WrapperMode::kFixed, 0.0),
      std::invalid_argument);
}

TEST(PolicyFactory, BuildsConfiguredPolicy) {
  PolicyContext ctx;
  ctx.num_actions = 3;
  auto rm = make_policy_factory({BanditAlgo::kRm, 0.1, WrapperMode::kNone, 0.1})(ctx);
  EXPECT_EQ(rm->name(), "rm");
  EXPECT_EQ(rm->num_actions(), 3);
  auto wrapped = make_policy_factory({BanditAlgo::kExp3, 0.1, WrapperMode::kFixed, 0.2})(ctx);
  EXPECT_EQ(wrapped->name(), "fixed(exp3)");
  EXPECT_THROW(make_policy_factory({BanditAlgo::kRm, 1.0, WrapperMode::kNone, 0.1}),
               std::invalid_argument);
  EXPECT_THROW(make_policy_factory({BanditAlgo::kRm, 0.1, WrapperMode::kFixed, 1.5}),
               std::invalid_argument);
}

TEST(SampleIndex, SkipsZeroMassTail) {
  Rng rng(1);
  const std::vector<double> d{0.5, 0.5, 0.0};
  for (int t = 0; t < 10000; ++t) EXPECT_LT(sample_index(d, rng), 2);
}

}  // namespace
}  // namespace smlab
