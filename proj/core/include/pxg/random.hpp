#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pxg {

/// One step of the SplitMix64 generator; advances `state`.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Order-sensitive 64-bit hash of a key path, e.g. (master, t-index, rep).
inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> keys) {
  std::uint64_t state = 0x6A09E667F3BCC909ULL;
  std::uint64_t out = splitmix64(state);
  for (std::uint64_t k : keys) {
    state ^= k + 0x9E3779B97F4A7C15ULL + (out << 6) + (out >> 2);
    out = splitmix64(state);
  }
  return out;
}

/// Deterministic random stream. The engine is mt19937_64 (bit-exact by the
/// standard) and all derived variates are computed here rather than through
/// <random> distributions, whose outputs are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Marsaglia's polar method.
  double normal();

  /// Poisson variate: sequential inversion below mean 30, PTRS above.
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pxg
