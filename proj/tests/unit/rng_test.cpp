#include "smlab/rng.hpp"

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

namespace smlab {
namespace {

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
  const auto out = Rng::philox({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerAllOnes) {
  const std::uint32_t f = 0xffffffffu;
  const auto out = Rng::philox({f, f, f, f}, {f, f});
  EXPECT_EQ(out, (Rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPiDigits) {
  const auto out = Rng::philox({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                               {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(out, (Rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 1000; ++k) ASSERT_EQ(a(), b());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  int equal = 0;
  for (int k = 0; k < 1000; ++k) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  Rng a(7), b(7);
  (void)a.split(3);
  (void)a.split(4);
  for (int k = 0; k < 100; ++k) ASSERT_EQ(a(), b());
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
  const Rng master(9);
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 2000; ++i) keys.insert(master.split(i).key());
  EXPECT_EQ(keys.size(), 2000u);
  Rng x = master.split(5), y = master.split(5);
  for (int k = 0; k < 100; ++k) ASSERT_EQ(x(), y());
}

TEST(Rng, SplitStreamsLookIndependent) {
  // Correlation of uniforms drawn from adjacent child streams.
  const Rng master(11);
  Rng a = master.split(0), b = master.split(1);
  const int n = 200000;
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (int k = 0; k < n; ++k) {
    const double u = a.uniform(), v = b.uniform();
    sa += u, sb += v, sab += u * v, saa += u * u, sbb += v * v;
  }
  const double cov = sab / n - (sa / n) * (sb / n);
  const double corr = cov / std::sqrt((saa / n - sa * sa / n / n) * (sbb / n - sb * sb / n / n));
  EXPECT_LT(std::fabs(corr), 0.01);
}

TEST(Rng, UniformInUnitInterval) {
  Rng r(3);
  double sum = 0;
  for (int k = 0; k < 100000; ++k) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.01);
}

TEST(Rng, BelowIsUniform) {
  Rng r(5);
  const int k = 7, n = 140000;
  std::vector<int> hist(k, 0);
  for (int s = 0; s < n; ++s) {
    const auto v = r.below(k);
    ASSERT_LT(v, static_cast<std::uint32_t>(k));
    ++hist[v];
  }
  double chi2 = 0;
  for (int c : hist) chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  EXPECT_LT(chi2, 22.46);  // 6 dof, p = 0.001
}

TEST(Rng, BernoulliRate) {
  Rng r(8);
  int hits = 0;
  for (int s = 0; s < 100000; ++s) hits += r.bernoulli(0.3);
  EXPECT_NEAR(hits / 100000.0, 0.3, 0.01);
}

}  // namespace
}  // namespace smlab
