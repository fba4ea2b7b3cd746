#pragma once

#include <cstdint>

namespace refinv {

// Deterministic splitmix64 generator.  We avoid <random> distributions on
// purpose: their output sequences are implementation-defined, and reproducible
// artifacts across toolchains are part of the contract.  splitmix64 plus the
// 53-bit mantissa trick gives identical doubles everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Modulo bias is irrelevant for our n (bounded by a few hundred), and the
    // simple reduction keeps the stream layout stable.
    return n == 0 ? 0 : next_u64() % n;
  }

  // Derive an independent child stream; used so that sub-tasks consume a
  // fixed number of draws from the parent regardless of their own appetite.
  Rng split() { return Rng(next_u64() ^ 0xD1B54A32D192ED03ull); }

 private:
  std::uint64_t state_;
};

}  // namespace refinv
