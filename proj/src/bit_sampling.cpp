#include "penbench/bit_sampling.hpp"

#include <bit>
#include <cmath>
#include <functional>

#include "penbench/errors.hpp"

namespace penbench {

BitSequence parse_bits(std::string_view text) {
  BitSequence bits;
  bits.reserve(text.size());
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (c != ' ' && c != '_') throw ValidationError("bit sequences use only '0' and '1'");
  }
  return bits;
}

std::string bits_to_string(const BitSequence& bits) {
  std::string out;
  out.reserve(bits.size());
  for (auto b : bits) out.push_back(b ? '1' : '0');
  return out;
}

bool is_valid_sequence(const BitSequence& bits) {
  std::size_t ones = 0;
  for (auto b : bits) {
    if (b > 1) return false;
    ones += b;
  }
  return !bits.empty() && 2 * ones > bits.size();
}

double commit_probability(long delta, int offset) {
  long exponent = delta + offset;
  if (exponent <= 0) return 1.0;
  return std::ldexp(1.0, static_cast<int>(-std::min(exponent, 2000L)));
}

mpq_class commit_probability_exact(long delta, int offset) {
  long exponent = delta + offset;
  mpq_class p(1);
  if (exponent > 0) mpq_div_2exp(p.get_mpq_t(), p.get_mpq_t(), static_cast<mp_bitcnt_t>(exponent));
  return p;
}

bool BitSampler::decide(Rng& rng) {
  if (committed_) throw ContractViolation("bit sampler already committed");
  committed_ = rng.bernoulli(commit_probability(delta_, offset_));
  return committed_;
}

void BitSampler::observe(std::uint8_t bit) {
  if (committed_) throw ContractViolation("bit sampler already committed");
  delta_ += bit ? -1 : 1;
}

bool play_game(const BitSequence& bits, Rng& rng, int offset) {
  if (!is_valid_sequence(bits)) throw ValidationError("invalid bit sequence: " + bits_to_string(bits));
  BitSampler player(offset);
  for (auto bit : bits) {
    if (player.decide(rng)) return bit == 1;
    player.observe(bit);
  }
  return false;
}

WinProbability exact_win_prob(const BitSequence& bits, int offset) {
  if (!is_valid_sequence(bits)) throw ValidationError("invalid bit sequence: " + bits_to_string(bits));
  WinProbability out;
  long delta = 0;
  if (bits.size() <= kExactWinProbMaxLength) {
    mpq_class survive(1);
    mpq_class win(0);
    for (auto bit : bits) {
      mpq_class p = commit_probability_exact(delta, offset);
      if (bit) win += survive * p;
      survive *= 1 - p;
      delta += bit ? -1 : 1;
    }
    out.value = static_cast<long double>(win.get_d());
    out.exact = std::move(win);
    return out;
  }
  long double survive = 1.0L;
  long double win = 0.0L;
  for (auto bit : bits) {
    long double p = std::ldexp(1.0L, static_cast<int>(-std::max(0L, std::min(delta + offset, 20000L))));
    if (bit) win += survive * p;
    survive *= 1.0L - p;
    delta += bit ? -1 : 1;
  }
  out.value = win;
  return out;
}

namespace {

// Depth-first enumeration of all bit strings of length 1..m_max. `visit` runs
// on every valid string with the running win probability of the player.
void enumerate(unsigned m_max, int offset,
               const std::function<void(const BitSequence&, const mpq_class&)>& visit) {
  BitSequence bits;
  std::function<void(long, std::size_t, const mpq_class&, const mpq_class&)> walk =
      [&](long delta, std::size_t ones, const mpq_class& survive, const mpq_class& win) {
        if (bits.size() == m_max) return;
        mpq_class p = commit_probability_exact(delta, offset);
        mpq_class next_survive = survive * (1 - p);
        for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
          bits.push_back(bit);
          mpq_class next_win = bit ? mpq_class(win + survive * p) : win;
          std::size_t next_ones = ones + bit;
          if (2 * next_ones > bits.size()) visit(bits, next_win);
          walk(delta + (bit ? -1 : 1), next_ones, next_survive, next_win);
          bits.pop_back();
        }
      };
  walk(0, 0, mpq_class(1), mpq_class(0));
}

void check_length(unsigned m_max) {
  if (m_max < 1 || m_max > 20) throw DomainError("exhaustive length must be in [1, 20]");
}

}  // namespace

ExhaustiveMinimum min_win_prob_exhaustive(unsigned m_max, int offset) {
  check_length(m_max);
  ExhaustiveMinimum best;
  bool first = true;
  enumerate(m_max, offset, [&](const BitSequence& bits, const mpq_class& win) {
    ++best.sequences_checked;
    if (first || win < best.minimum) {
      best.minimum = win;
      best.witness = bits;
      first = false;
    }
  });
  return best;
}

mpq_class inductive_bound(long delta) {
  if (delta < 0) throw DomainError("the inductive bound is stated for delta >= 0");
  mpq_class half_power(1);
  mpq_div_2exp(half_power.get_mpq_t(), half_power.get_mpq_t(), static_cast<mp_bitcnt_t>(delta + 1));
  return (1 - half_power) / 3;
}

InductiveCheck check_inductive_bound(unsigned m_max, int offset) {
  check_length(m_max);
  InductiveCheck check;
  std::vector<long> delta_before;
  enumerate(m_max, offset, [&](const BitSequence& bits, const mpq_class&) {
    if (!check.holds) return;
    delta_before.assign(bits.size(), 0);
    long delta = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      delta_before[i] = delta;
      delta += bits[i] ? -1 : 1;
    }
    mpq_class continuation(0);
    for (std::size_t i = bits.size(); i-- > 0;) {
      mpq_class p = commit_probability_exact(delta_before[i], offset);
      continuation = (bits[i] ? p : mpq_class(0)) + (1 - p) * continuation;
      if (delta_before[i] >= 0) {
        ++check.states_checked;
        if (continuation < inductive_bound(delta_before[i])) {
          check.holds = false;
          check.counterexample = bits;
          check.counterexample_prefix = i;
          return;
        }
      }
    }
  });
  return check;
}

mpq_class naive_baseline_win_prob(const BitSequence& bits, std::size_t n) {
  if (!is_valid_sequence(bits)) throw ValidationError("invalid bit sequence: " + bits_to_string(bits));
  if (n < bits.size()) throw ValidationError("sequence longer than the announced maximum");
  unsigned rounds = static_cast<unsigned>(std::bit_width(n - 1)) + 1;  // r = 0..ceil(log2 n)
  if (n == 1) rounds = 1;
  mpq_class total(0);
  for (unsigned r = 0; r < rounds; ++r) {
    std::size_t guess = std::size_t{1} << r;
    std::size_t ones = 0;
    for (std::size_t i = 0; i < std::min(guess, bits.size()); ++i) ones += bits[i];
    total += mpq_class(static_cast<unsigned long>(ones), static_cast<unsigned long>(guess));
  }
  total /= rounds;
  total.canonicalize();
  return total;
}

ExhaustiveMinimum naive_baseline_min_exhaustive(unsigned m_max) {
  check_length(m_max);
  ExhaustiveMinimum best;
  bool first = true;
  enumerate(m_max, 2, [&](const BitSequence& bits, const mpq_class&) {
    ++best.sequences_checked;
    mpq_class win = naive_baseline_win_prob(bits, m_max);
    if (first || win < best.minimum) {
      best.minimum = win;
      best.witness = bits;
      first = false;
    }
  });
  return best;
}

}  // namespace penbench
