#pragma once

#include <cstdint>
#include <random>
#include <utility>

namespace penbench {

/// splitmix64 finalizer. All stream derivation goes through this function so
/// that results are reproducible across builds and platforms.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the random stream owned by trial `index` of an experiment seeded
/// with `master`. `lane` separates independent consumers inside one trial
/// (instance draw, strategy coins, samples).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index,
                                    std::uint64_t lane = 0) {
  return mix64(mix64(master ^ mix64(index)) ^ mix64(lane + 0x5851f42d4c957f2dULL));
}

/// Seeded 64-bit random source. Built on std::mt19937_64, whose output
/// sequence is fixed by the standard; the real-valued conversions below are
/// done by hand for the same reason (std distributions are
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_closed() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  bool bernoulli(double p) { return uniform() < p; }
  bool coin() { return (engine_() >> 63) != 0; }

  /// Independent child stream; advances this generator by one draw.
  Rng split(std::uint64_t lane = 0) { return Rng(mix64(engine_() ^ mix64(lane))); }

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace penbench
