#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace aerialsim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream: output n is a pure function of (key, n).
///
/// Each environment owns one stream, so the values an environment draws never
/// depend on how environments are split among workers.
struct CounterRng {
  using result_type = std::uint64_t;

  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  static CounterRng for_env(std::uint64_t base_seed, std::uint64_t env_index) {
    return CounterRng{mix64(base_seed ^ env_index), 0};
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key + 0xD1B54A32D192ED03ULL * counter++); }

  friend bool operator==(const CounterRng&, const CounterRng&) = default;
};

inline double sample_uniform(CounterRng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double sample_normal(CounterRng& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

}  // namespace aerialsim
