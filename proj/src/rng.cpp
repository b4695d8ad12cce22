#include "penbench/rng.hpp"

namespace penbench {

std::uint64_t Rng::below(std::uint64_t bound) {
  // Lemire's multiply-shift with rejection; unbiased for every bound.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace penbench
