#pragma once

#include <cstdint>

namespace zk {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so runs are reproducible regardless of evaluation order or thread scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {}

  // splitmix64 finalizer applied to the mixed key; full 64-bit avalanche.
  static std::uint64_t hash(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t bits(std::uint64_t counter) const {
    return hash(hash(hash(seed_) ^ stream_) ^ counter);
  }

  // Uniform in [0, 1): 53 mantissa bits, exact on every IEEE-754 platform.
  double uniform01(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // Uniform in [-1, 1).
  double uniform_sym(std::uint64_t counter) const { return 2.0 * uniform01(counter) - 1.0; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace zk
