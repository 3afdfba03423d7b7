#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace smlab {

// Philox4x32-10 counter-based generator (Salmon et al., "Parallel random
// numbers: as easy as 1, 2, 3"). A stream is identified by its 64-bit key;
// split(index) derives an independent child stream, so every node, player
// and run can draw from its own reproducible sequence.
class Rng {
 public:
  using result_type = std::uint64_t;
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Rng(std::uint64_t seed = 0) : key_(key_from_seed(seed)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    const std::uint64_t hi = next32();
    const std::uint64_t lo = next32();
    return (hi << 32) | lo;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be positive.
  std::uint32_t below(std::uint32_t n);

  bool bernoulli(double p) { return uniform() < p; }

  // Child stream keyed by (this stream's key, index); does not advance *this.
  Rng split(std::uint64_t index) const;

  std::uint64_t key() const {
    return (static_cast<std::uint64_t>(key_[0]) << 32) | key_[1];
  }

  // The raw block function; exposed for known-answer tests.
  static Counter philox(Counter ctr, Key key);

 private:
  struct RawKey {};
  Rng(RawKey, Key key) : key_(key) {}

  static Key key_from_seed(std::uint64_t seed);
  std::uint32_t next32();

  Key key_;
  std::uint64_t counter_ = 0;
  Counter block_{};
  int used_ = 4;
};

// splitmix64 finalizer; used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace smlab
