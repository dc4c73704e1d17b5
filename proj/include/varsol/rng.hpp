#pragma once

#include <cstdint>
#include <random>

namespace varsol {

// Deterministic sampling utilities. std::mt19937_64 has a bit-exact output
// sequence by the standard, but the std distributions do not, so uniforms
// are mapped manually: byte-identical reports require bit-identical draws.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return gen_(); }

  // Uniform integer in [0, m) by scaling; bias is irrelevant for test-point
  // selection and this keeps the draw count fixed at one per call.
  std::size_t index(std::size_t m) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(m)) % m;
  }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; decorrelates substream seeds derived from
// (campaign seed, scenario index, sample index) so records do not depend
// on execution order.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = seed;
  z += 0x9E3779B97F4A7C15ull * (a + 1);
  z += 0xBF58476D1CE4E5B9ull * (b + 1);
  z ^= z >> 30; z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27; z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

}  // namespace varsol
