#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "penbench/distributions.hpp"
#include "penbench/engine.hpp"
#include "penbench/instance.hpp"
#include "penbench/rng.hpp"

namespace penbench {

/// n independent draws from `law`, in draw order.
Instance iid_from(const DistributionPtr& law, std::size_t n, Rng& rng);

/// One independent draw from each law, in the given order.
Instance independent_from(std::span<const DistributionPtr> laws, Rng& rng);

/// Multiplicities base^{k-j} of level j = 0..k. Throws ValidationError when
/// k < 1, base < 2, or the total size overflows 64 bits.
std::vector<std::uint64_t> power_level_counts(unsigned k, unsigned base);

/// The multiset in which value j appears base^{k-j} times, listed in
/// ascending order with a uniform_random order model. Throws ValidationError
/// if the size exceeds `max_size`.
Instance power_counts(unsigned k, unsigned base, std::uint64_t max_size = 1ULL << 27);

/// Geometric level draw: P[j] = 2^{-(j+1)}, read off the leading zeros of a
/// 64-bit uniform word and clamped at 62.
unsigned geometric_level(Rng& rng);

/// Lazy form of the non-uniform arrival generator: draws a geometric level,
/// keeps it only while that level still has copies left out of 4^{k-j}, and
/// stops once every copy has arrived. Values are produced on demand so a game
/// that stops early never pays for the rest of the sequence.
class GeometricOrderSource final : public ValueSource {
 public:
  GeometricOrderSource(unsigned k, Rng& rng, std::uint64_t iteration_cap = 1'000'000'000ULL);

  double next() override;

  std::uint64_t size() const { return total_; }
  unsigned k() const { return k_; }
  /// Copies of level j not yet produced.
  std::uint64_t remaining(unsigned level) const { return remaining_.at(level); }
  std::uint64_t produced() const { return produced_; }

 private:
  unsigned k_;
  Rng& rng_;
  std::uint64_t iteration_cap_;
  std::uint64_t iterations_ = 0;
  std::uint64_t total_ = 0;
  std::uint64_t produced_ = 0;
  std::vector<std::uint64_t> remaining_;
};

/// Materialized run of the generator above (order model generator_defined).
Instance nonuniform_geometric_order(unsigned k, Rng& rng);

/// n i.i.d. draws of min{Exp(1), ln(n)/2} under uniform random order. n >= 2.
Instance truncated_exponential_secretary(std::size_t n, Rng& rng);

/// The truncation cap ln(n)/2 used above.
double truncated_exponential_cap(std::size_t n);

}  // namespace penbench
