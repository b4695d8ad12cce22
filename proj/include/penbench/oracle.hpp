#pragma once

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace penbench {

/// H_n = sum_{k=1}^n 1/k, exact. Uses binary splitting.
mpq_class harmonic(std::uint64_t n);
/// Same sum in long double, added smallest term first.
long double harmonic_float(std::uint64_t n);

struct ExpectedMaxCheck {
  std::uint64_t n = 0;
  std::uint64_t trials = 0;
  double mean = 0.0;
  double se = 0.0;
  double target = 0.0;  // H_n
  double z = 0.0;       // (mean - target) / se
  bool passed = false;  // |mean - target| <= 4 se
};

/// Monte Carlo mean of the max of n Exp(1) draws against H_n. trials >= 10^4.
ExpectedMaxCheck expected_max_exponential_check(std::uint64_t n, std::uint64_t trials,
                                                std::uint64_t seed);

struct Lemma62Bound {
  mpz_class good;   // G = sum_{j=theta+delta}^{k} 2^{k-j}
  mpz_class bad;    // B = sum_{j=theta+1}^{theta+delta-1} 2^{k-j}
  mpq_class ratio;  // G / (B + G)
  mpq_class cap;    // 4 * 2^{-delta}
  bool within_cap = false;
};

/// Requires 1 <= delta <= k and 0 <= theta <= k - delta (DomainError otherwise).
Lemma62Bound lemma62_bound(unsigned k, unsigned theta, unsigned delta);

struct Lemma62Dp {
  mpq_class value;  // best P[accept a good option]
  mpq_class bound;  // G / (B + G)
  bool equal = false;
};

/// Exact optimum over commit/observe policies on the base-2 level instance
/// under uniform order, over lumped states (fail, bad, good counts). k <= 6,
/// otherwise ResourceError.
Lemma62Dp lemma62_optimal_dp(unsigned k, unsigned theta, unsigned delta);

/// The same optimum over full per-level multiset states. Refuses (ResourceError)
/// when the state space exceeds `max_states`.
mpq_class lemma62_optimal_dp_levels(unsigned k, unsigned theta, unsigned delta,
                                    std::uint64_t max_states = 1'000'000);

/// Continuation value of the lumped commit/observe game from (fail, bad, good).
mpq_class lemma62_state_value(unsigned fail, unsigned bad, unsigned good);

/// Optimal expected score of a full-information player under uniform random
/// order on a multiset of small integers (value v appears counts[v] times).
/// Limits: total count <= 8 and largest value <= 5, else ResourceError.
mpq_class optimal_online_dp(const std::vector<unsigned>& counts);

/// Multiset given as a value list, e.g. {1, 2} -> counts {0, 1, 1}.
std::vector<unsigned> counts_from_values(const std::vector<unsigned>& values);

struct RiskyWinCheck {
  unsigned k = 0;
  unsigned theta = 0;
  unsigned delta = 0;
  std::uint64_t trials = 0;        // sequences generated
  std::uint64_t used_trials = 0;   // sequences with at least one active position
  double mean = 0.0;               // mean per-sequence frequency of value theta+delta at active positions
  double se = 0.0;
  double bound = 0.0;              // 2^{1-delta}
  bool passed = false;             // mean <= bound + 3 se
};

/// On the non-uniform geometric generator with parameter k: among positions at
/// which value theta+1 still has unseen copies, the frequency with which the
/// arriving value equals theta+delta. Requires delta >= 3 and theta + delta <= k.
RiskyWinCheck risky_win_probability_check(unsigned k, unsigned theta, unsigned delta,
                                          std::uint64_t trials, std::uint64_t seed);

/// 2^{-delta} / (2^{-1} + 2^{-delta}): the conditional probability when only
/// levels theta+1 and theta+delta remain.
mpq_class risky_two_level_exact(unsigned delta);

}  // namespace penbench
