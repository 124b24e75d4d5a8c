#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "jpmsim/common.hpp"

namespace jpmsim {

/// SplitMix64 generator. Small state, so every shot or cell gets its own
/// stream derived from (seed, stream id, index) and shots can run in any order.
///
/// Satisfies UniformRandomBitGenerator so it can also drive <random>
/// distributions. uniform() and normal_pair() are spelled out so that the
/// number of raw draws per variate is fixed:
///   uniform()     -> 1 draw, 53-bit mantissa in [0, 1)
///   normal_pair() -> 2 draws (Box-Muller), two independent N(0, 1) values
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::pair<double, double> normal_pair() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = kTwoPi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

 private:
  std::uint64_t state_;
};

/// Stream ids used by the simulators; kept distinct so that, e.g., the IQ
/// readout of shot i never reuses the draws of shot i's detection.
enum class Stream : std::uint64_t {
  ground_shot = 0,
  excited_shot = 1,
  iq_readout = 2,
  tomogram_cell = 3,
  fringe_point = 4,
};

/// Seed for the substream of item `index` in `stream`.
inline std::uint64_t substream_seed(std::uint64_t seed, Stream stream, std::uint64_t index) {
  SplitMix64 mix(seed ^ (static_cast<std::uint64_t>(stream) * 0xD1B54A32D192ED03ULL));
  const std::uint64_t base = mix();
  SplitMix64 mix2(base + index * 0x9E3779B97F4A7C15ULL);
  return mix2();
}

inline SplitMix64 substream(std::uint64_t seed, Stream stream, std::uint64_t index) {
  return SplitMix64(substream_seed(seed, stream, index));
}

}  // namespace jpmsim
