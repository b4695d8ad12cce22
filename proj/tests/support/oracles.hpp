#pragma once

// Reference computations for the tests, written directly from the defining
// formulas and kept apart from the library code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace oracle_ref {

/// sum_{k=1}^n 1/k, term by term.
inline mpq_class harmonic_naive(std::uint64_t n) {
  mpq_class sum = 0;
  for (std::uint64_t k = 1; k <= n; ++k) sum += mpq_class(1, k);
  return sum;
}

/// 2^{-(delta+offset)} capped at 1.
inline mpq_class commit_probability(long delta, int offset = 2) {
  long e = delta + offset;
  if (e <= 0) return 1;
  mpz_class den = 1;
  den <<= static_cast<unsigned long>(e);
  return mpq_class(mpz_class(1), den);
}

/// sum over ones of p_i * prod_{j<i} (1 - p_j), p from the running zeros-minus-ones.
inline mpq_class win_probability(const std::string& bits, int offset = 2) {
  mpq_class alive = 1, win = 0;
  long delta = 0;
  for (char c : bits) {
    mpq_class p = commit_probability(delta, offset);
    if (c == '1') win += alive * p;
    alive *= 1 - p;
    delta += c == '0' ? 1 : -1;
  }
  return win;
}

inline bool valid_bits(const std::string& bits) {
  auto ones = std::count(bits.begin(), bits.end(), '1');
  return 2 * static_cast<std::size_t>(ones) > bits.size();
}

/// G = sum_{j=theta+delta}^{k} 2^{k-j}, B = sum_{j=theta+1}^{theta+delta-1} 2^{k-j}.
struct LevelSums {
  long long good = 0;
  long long bad = 0;
};
inline LevelSums level_sums(unsigned k, unsigned theta, unsigned delta) {
  LevelSums s;
  for (unsigned j = theta + delta; j <= k; ++j) s.good += 1LL << (k - j);
  for (unsigned j = theta + 1; j + 1 <= theta + delta; ++j) s.bad += 1LL << (k - j);
  return s;
}

/// Number of values strictly above ((j-1)/k) * ref.
inline std::size_t count_above_edge(const std::vector<double>& values, std::size_t j, std::size_t k,
                                    double ref) {
  double edge = ref * static_cast<double>(j - 1) / static_cast<double>(k);
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [&](double v) { return v > edge; }));
}

/// Smallest j in 1..k-1 with n_j < n_{>=j+1}, where n_j counts values in
/// (((j-1)/k) ref, (j/k) ref]. Zero if none.
inline std::size_t smallest_growing_bucket(const std::vector<double>& values, std::size_t k, double ref) {
  for (std::size_t j = 1; j + 1 <= k; ++j) {
    std::size_t at_least_j = count_above_edge(values, j, k, ref);
    std::size_t at_least_next = count_above_edge(values, j + 1, k, ref);
    std::size_t n_j = at_least_j - at_least_next;
    if (n_j < at_least_next) return j;
  }
  return 0;
}

/// Smallest k >= 2 with (k-1) n^{-1/(k-1)} >= 1, scanned in floating point.
inline std::size_t gap_k_scan(std::size_t n) {
  for (std::size_t k = 2;; ++k) {
    double lhs = static_cast<double>(k - 1) * std::pow(static_cast<double>(n), -1.0 / static_cast<double>(k - 1));
    if (lhs >= 1.0 - 1e-12) return k;
  }
}

/// Upper critical value of chi-square with `df` degrees of freedom at tail
/// probability 1e-3 (Wilson-Hilferty).
inline double chi_square_critical_1e3(double df) {
  const double z = 3.090232306167813;  // standard normal upper 1e-3 point
  double a = 2.0 / (9.0 * df);
  double t = 1.0 - a + z * std::sqrt(a);
  return df * t * t * t;
}

}  // namespace oracle_ref
