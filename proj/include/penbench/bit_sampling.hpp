#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "penbench/rng.hpp"

namespace penbench {

/// Bits of an adversarial sequence, each 0 or 1.
using BitSequence = std::vector<std::uint8_t>;

/// Parses "0110..." into bits; throws ValidationError on other characters.
BitSequence parse_bits(std::string_view text);
std::string bits_to_string(const BitSequence& bits);

/// True iff the sequence is nonempty and strictly more than half its bits are 1.
bool is_valid_sequence(const BitSequence& bits);

/// Commit probability 2^{-(delta + offset)}, clamped to 1. The player's rule
/// uses offset 2; other offsets exist for mutation checks.
double commit_probability(long delta, int offset = 2);
mpq_class commit_probability_exact(long delta, int offset = 2);

/// Per-game state of the committing player. delta counts zeros minus ones.
class BitSampler {
 public:
  explicit BitSampler(int offset = 2) : offset_(offset) {}

  long delta() const { return delta_; }
  bool committed() const { return committed_; }

  /// Decides whether to commit to the next unseen bit.
  bool decide(Rng& rng);
  /// Records a bit seen without committing.
  void observe(std::uint8_t bit);

 private:
  int offset_;
  long delta_ = 0;
  bool committed_ = false;
};

/// One simulated game: true iff the player commits to a 1.
bool play_game(const BitSequence& bits, Rng& rng, int offset = 2);

struct WinProbability {
  std::optional<mpq_class> exact;  // present when the sequence length is at most 10^4
  long double value = 0.0L;        // always set; within 1e-12 when computed in floating point
};

inline constexpr std::size_t kExactWinProbMaxLength = 10'000;

/// sum over positions i with bit 1 of p_i * prod_{j<i} (1 - p_j).
WinProbability exact_win_prob(const BitSequence& bits, int offset = 2);

struct ExhaustiveMinimum {
  mpq_class minimum;
  BitSequence witness;
  std::uint64_t sequences_checked = 0;
};

/// Minimum exact win probability over every valid sequence of length <= m_max.
/// m_max must be in [1, 20].
ExhaustiveMinimum min_win_prob_exhaustive(unsigned m_max, int offset = 2);

/// (1/3)(1 - 2^{-(delta+1)}); throws DomainError for delta < 0.
mpq_class inductive_bound(long delta);

struct InductiveCheck {
  bool holds = true;
  std::uint64_t states_checked = 0;
  BitSequence counterexample;        // sequence that violated the bound, if any
  std::size_t counterexample_prefix = 0;
};

/// For every valid sequence of length <= m_max and every prefix after which
/// zeros - ones >= 0, checks that the exact continuation win probability of an
/// uncommitted player is at least inductive_bound(zeros - ones).
InductiveCheck check_inductive_bound(unsigned m_max, int offset = 2);

/// Comparison player: guesses a length 2^r with r uniform in {0..ceil(log2 n)}
/// and commits to a uniformly random position among the first 2^r bits.
mpq_class naive_baseline_win_prob(const BitSequence& bits, std::size_t n);

/// Minimum of naive_baseline_win_prob over valid sequences of length <= m_max,
/// with the player told n = m_max.
ExhaustiveMinimum naive_baseline_min_exhaustive(unsigned m_max);

}  // namespace penbench
