#include "smlab/rng.hpp"

namespace smlab {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Counter Rng::philox(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

Rng::Key Rng::key_from_seed(std::uint64_t seed) {
  const std::uint64_t k = mix64(seed);
  return {static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)};
}

std::uint32_t Rng::next32() {
  if (used_ == 4) {
    block_ = philox({static_cast<std::uint32_t>(counter_),
                     static_cast<std::uint32_t>(counter_ >> 32), 0u, 0u},
                    key_);
    ++counter_;
    used_ = 0;
  }
  return block_[used_++];
}

std::uint32_t Rng::below(std::uint32_t n) {
  // Lemire's nearly-divisionless method.
  std::uint64_t m = static_cast<std::uint64_t>(next32()) * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = (0u - n) % n;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(next32()) * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

Rng Rng::split(std::uint64_t index) const {
  const std::uint64_t k = mix64(key() ^ mix64(index + 0x632BE59BD9B4E019ull));
  return Rng(RawKey{},
             {static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k)});
}

}  // namespace smlab
