#pragma once

#include <cstdint>

namespace spinbath {

// SplitMix64. Small, fast, and fully specified, so sampled coefficients are
// bitwise reproducible across platforms and standard-library versions
// (std::uniform_real_distribution makes no such guarantee).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Derives the seed of substream `stream` of a master seed. The finalizer is
// bijective and the stream multiplier odd, so distinct streams of one seed
// never collide. Stream 0 is reserved for the system amplitudes; particle i
// (1-based) uses stream i, which keeps the first particles of a sampled
// config independent of the total particle count.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x632BE59BD9B4E019ull * stream + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace spinbath
