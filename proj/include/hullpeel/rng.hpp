#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace hullpeel {

/// SplitMix64 finalizer, used only to decorrelate stream keys before they
/// reach the engine's seed sequence.
constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// A random stream keyed by (seed, stream path).  Distinct paths give
/// statistically independent streams; the same key always reproduces the
/// same sequence.  Variate transforms are written here rather than taken
/// from <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  static constexpr std::string_view algorithm_name =
      "mt19937_64[seed_seq(splitmix64(seed,stream-path))]";

  explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
    std::uint64_t state = seed;
    // Path length participates in the key so {} and {0} differ.
    state ^= splitmix64(state) + path.size();
    for (std::uint64_t word : path) {
      std::uint64_t s = state ^ word;
      state = splitmix64(s);
    }
    std::array<std::uint32_t, 8> words{};
    for (auto& w : words) w = static_cast<std::uint32_t>(splitmix64(state) >> 32);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0, 1) with 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard exponential, strictly positive.
  double exponential() { return -std::log(uniform_open()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hullpeel
