#pragma once

#include <cstdint>
#include <string_view>

namespace unate {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seeded generator used by every randomized component: splitmix64, a
/// counter-based generator (output k is mix64(seed + k * golden)), with Lemire's
/// bounded-integer reduction. Both parts are fully specified, so a seed replays
/// the same stream on any platform.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64+lemire";
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    return mix64(state_);
  }

  /// Uniform in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t x = next();
    __uint128_t m = static_cast<__uint128_t>(x) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) [[unlikely]] {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        x = next();
        m = static_cast<__uint128_t>(x) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool coin() { return (next() >> 63) != 0; }

  /// True with probability num/den.
  bool bernoulli(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

  /// Uniformly random subset of mask (each bit kept with probability 1/2).
  std::uint64_t subset(std::uint64_t mask) { return next() & mask; }

 private:
  std::uint64_t state_;
};

/// Deterministic seed derivation from a base seed and up to two stream indices.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(mix64(base + Rng::kGolden) ^ a) + b * 0xd6e8feb86659fd93ULL);
}

}  // namespace unate
