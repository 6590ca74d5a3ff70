#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace pgpe {

/// SplitMix64 finalizer. Used to decorrelate run seeds derived from a base seed.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of the random stream owned by run `run_index` of a batch.
///
///   stream_seed = splitmix64(base_seed XOR splitmix64(run_index))
[[nodiscard]] constexpr std::uint64_t derive_stream_seed(std::uint64_t base_seed,
                                                         std::uint64_t run_index) noexcept {
  return splitmix64(base_seed ^ splitmix64(run_index));
}

/// Reproducible random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. The uniform and Gaussian transforms are implemented here rather
/// than taken from <random> distributions, whose algorithms are left to the
/// standard library vendor. Together this pins the whole stream:
///
///   uniform01()  = (engine() >> 11) * 2^-53                 in [0, 1)
///   gaussian()   = Marsaglia polar method on 2*uniform01()-1 pairs,
///                  the second variate of each accepted pair is cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

  [[nodiscard]] double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  [[nodiscard]] double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  [[nodiscard]] double gaussian();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

}  // namespace pgpe
