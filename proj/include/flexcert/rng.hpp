#pragma once

#include <cstdint>
#include <random>

namespace flexcert {

// Seedable generator with platform-independent output. The engine is the
// standard 64-bit Mersenne Twister, whose sequence is fixed by the C++
// standard; uniform and Gaussian transforms are implemented here because the
// <random> distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Seed for chunk `index` of a stream rooted at `seed` (splitmix64 mixing).
  // Chunked work seeded this way is reproducible for any worker count.
  static std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace flexcert
