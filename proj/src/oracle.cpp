#include "penbench/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "penbench/errors.hpp"
#include "penbench/instances.hpp"
#include "penbench/rng.hpp"

namespace penbench {

namespace {

// sum_{k=a}^{b-1} 1/k = p/q.
void harmonic_split(std::uint64_t a, std::uint64_t b, mpz_class& p, mpz_class& q) {
  if (b - a == 1) {
    p = 1;
    q = static_cast<unsigned long>(a);
    return;
  }
  std::uint64_t mid = a + (b - a) / 2;
  mpz_class p1, q1, p2, q2;
  harmonic_split(a, mid, p1, q1);
  harmonic_split(mid, b, p2, q2);
  p = p1 * q2 + p2 * q1;
  q = q1 * q2;
}

mpz_class power_of_two(unsigned e) {
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), 2, e);
  return out;
}

struct Mean {
  double mean = 0.0;
  double se = 0.0;
};

Mean mean_and_se(const std::vector<double>& xs) {
  Mean m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return m;
}

void check_lemma62_range(unsigned k, unsigned theta, unsigned delta) {
  if (k < 1 || delta < 1 || delta > k || theta > k - delta) {
    throw DomainError("level-game parameters need 1 <= delta <= k and 0 <= theta <= k - delta");
  }
}

}  // namespace

mpq_class harmonic(std::uint64_t n) {
  if (n == 0) throw ValidationError("harmonic(n) needs n >= 1");
  mpz_class p, q;
  harmonic_split(1, n + 1, p, q);
  mpq_class h(p, q);
  h.canonicalize();
  return h;
}

long double harmonic_float(std::uint64_t n) {
  if (n == 0) throw ValidationError("harmonic(n) needs n >= 1");
  long double sum = 0.0L;
  for (std::uint64_t k = n; k >= 1; --k) sum += 1.0L / static_cast<long double>(k);
  return sum;
}

ExpectedMaxCheck expected_max_exponential_check(std::uint64_t n, std::uint64_t trials,
                                                std::uint64_t seed) {
  if (n == 0) throw ValidationError("expected max check needs n >= 1");
  if (trials < 10'000) throw ValidationError("expected max check needs at least 10^4 trials");
  std::vector<double> maxima(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(stream_seed(seed, t));
    // max_i -ln(u_i) = -ln(min_i u_i).
    double smallest = 1.0;
    for (std::uint64_t i = 0; i < n; ++i) smallest = std::min(smallest, rng.uniform_open_closed());
    maxima[t] = -std::log(smallest);
  }
  auto m = mean_and_se(maxima);
  ExpectedMaxCheck check;
  check.n = n;
  check.trials = trials;
  check.mean = m.mean;
  check.se = m.se;
  check.target = harmonic(n).get_d();
  check.z = m.se > 0.0 ? (m.mean - check.target) / m.se : 0.0;
  check.passed = std::abs(m.mean - check.target) <= 4.0 * m.se;
  return check;
}

Lemma62Bound lemma62_bound(unsigned k, unsigned theta, unsigned delta) {
  check_lemma62_range(k, theta, delta);
  Lemma62Bound out;
  for (unsigned j = theta + delta; j <= k; ++j) out.good += power_of_two(k - j);
  for (unsigned j = theta + 1; j + 1 <= theta + delta; ++j) out.bad += power_of_two(k - j);
  out.ratio = mpq_class(out.good, out.good + out.bad);
  out.ratio.canonicalize();
  out.cap = mpq_class(mpz_class(4), power_of_two(delta));
  out.cap.canonicalize();
  out.within_cap = out.ratio <= out.cap;
  return out;
}

mpq_class lemma62_state_value(unsigned fail, unsigned bad, unsigned good) {
  std::size_t sb = bad + 1, sg = good + 1;
  std::vector<mpq_class> memo(static_cast<std::size_t>(fail + 1) * sb * sg);
  auto at = [&](unsigned f, unsigned b, unsigned g) -> mpq_class& {
    return memo[(static_cast<std::size_t>(f) * sb + b) * sg + g];
  };
  // Fill in order of increasing remaining count.
  for (unsigned f = 0; f <= fail; ++f) {
    for (unsigned b = 0; b <= bad; ++b) {
      for (unsigned g = 0; g <= good; ++g) {
        unsigned t = f + b + g;
        if (t == 0) {
          at(f, b, g) = 0;
          continue;
        }
        mpq_class after_fail = f ? mpq_class(f * at(f - 1, b, g)) : mpq_class(0);
        mpq_class commit = (after_fail + g) / t;
        mpq_class observe = after_fail;
        if (b) observe += b * at(f, b - 1, g);
        if (g) observe += g * at(f, b, g - 1);
        observe /= t;
        at(f, b, g) = std::max(commit, observe);
      }
    }
  }
  return at(fail, bad, good);
}

Lemma62Dp lemma62_optimal_dp(unsigned k, unsigned theta, unsigned delta) {
  check_lemma62_range(k, theta, delta);
  if (k > 6) throw ResourceError("level-game dynamic program is limited to k <= 6");
  auto bound = lemma62_bound(k, theta, delta);
  unsigned fail = 0;
  for (unsigned j = 0; j <= theta; ++j) fail += 1u << (k - j);
  Lemma62Dp out;
  out.value = lemma62_state_value(fail, static_cast<unsigned>(bound.bad.get_ui()),
                                  static_cast<unsigned>(bound.good.get_ui()));
  out.bound = bound.ratio;
  out.equal = out.value == out.bound;
  return out;
}

mpq_class lemma62_optimal_dp_levels(unsigned k, unsigned theta, unsigned delta,
                                    std::uint64_t max_states) {
  check_lemma62_range(k, theta, delta);
  std::vector<unsigned> initial(k + 1);
  std::vector<std::uint64_t> radix(k + 1);
  std::uint64_t states = 1;
  for (unsigned j = 0; j <= k; ++j) {
    initial[j] = 1u << (k - j);
    radix[j] = states;
    states *= initial[j] + 1;
    if (states > max_states) throw ResourceError("per-level state space too large");
  }
  std::vector<mpq_class> memo(states);
  std::vector<bool> done(states, false);
  std::vector<unsigned> counts = initial;
  std::uint64_t index = 0;
  for (unsigned j = 0; j <= k; ++j) index += counts[j] * radix[j];

  std::function<const mpq_class&(std::uint64_t)> value = [&](std::uint64_t idx) -> const mpq_class& {
    if (done[idx]) return memo[idx];
    unsigned t = 0;
    for (unsigned c : counts) t += c;
    mpq_class result(0);
    if (t > 0) {
      mpq_class commit(0), observe(0);
      for (unsigned j = 0; j <= k; ++j) {
        if (counts[j] == 0) continue;
        unsigned c = counts[j];
        --counts[j];
        mpq_class next = value(idx - radix[j]);
        ++counts[j];
        observe += c * next;
        if (j <= theta) commit += c * next;
        else if (j >= theta + delta) commit += c;
      }
      result = std::max(commit, observe) / t;
    }
    memo[idx] = result;
    done[idx] = true;
    return memo[idx];
  };
  return value(index);
}

std::vector<unsigned> counts_from_values(const std::vector<unsigned>& values) {
  if (values.empty()) return {};
  std::vector<unsigned> counts(*std::max_element(values.begin(), values.end()) + 1, 0);
  for (unsigned v : values) ++counts[v];
  return counts;
}

mpq_class optimal_online_dp(const std::vector<unsigned>& counts_in) {
  unsigned total = std::accumulate(counts_in.begin(), counts_in.end(), 0u);
  std::vector<unsigned> counts = counts_in;
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (total > 8) throw ResourceError("optimal online DP is limited to 8 options");
  if (counts.size() > 6) throw ResourceError("optimal online DP is limited to values <= 5");
  if (total == 0) return 0;

  std::map<std::pair<std::vector<unsigned>, int>, mpq_class> memo;
  std::function<mpq_class(const std::vector<unsigned>&)> game_value;

  // Value of an open step with cumulative spend c (-1: untested) after all
  // tests so far passed.
  std::function<mpq_class(const std::vector<unsigned>&, int)> step_value =
      [&](const std::vector<unsigned>& m, int c) -> mpq_class {
    auto key = std::make_pair(m, c);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int top = static_cast<int>(m.size()) - 1;
    while (top >= 0 && m[top] == 0) --top;
    unsigned above = 0;
    for (int v = c + 1; v <= top; ++v) above += m[v];
    if (above == 0) throw ContractViolation("unreachable DP state");
    int paid = std::max(c, 0);

    mpq_class accept(0), reject(0);
    std::vector<mpq_class> after_removal(m.size());
    for (int v = std::max(c + 1, 0); v <= top; ++v) {
      if (m[v] == 0) continue;
      auto rest = m;
      --rest[v];
      after_removal[v] = game_value(rest);
      accept += m[v] * (v - paid);
      reject += m[v] * after_removal[v];
    }
    mpq_class best = std::max(accept, reject) / above;
    for (int next = std::max(c + 1, 0); next < top; ++next) {
      mpq_class fail_part(0);
      unsigned passing = 0;
      for (int v = std::max(c + 1, 0); v <= top; ++v) {
        if (v <= next) fail_part += m[v] * after_removal[v];
        else passing += m[v];
      }
      mpq_class option = (fail_part + passing * step_value(m, next)) / above;
      best = std::max(best, option);
    }
    memo.emplace(key, best);
    return best;
  };

  game_value = [&](const std::vector<unsigned>& m) -> mpq_class {
    unsigned t = std::accumulate(m.begin(), m.end(), 0u);
    if (t == 0) return 0;
    return step_value(m, -1);
  };
  return game_value(counts);
}

RiskyWinCheck risky_win_probability_check(unsigned k, unsigned theta, unsigned delta,
                                          std::uint64_t trials, std::uint64_t seed) {
  if (delta < 3) throw DomainError("risky-win check needs delta >= 3");
  if (theta + delta > k) throw DomainError("risky-win check needs theta + delta <= k");
  if (trials == 0) throw ValidationError("risky-win check needs trials >= 1");
  RiskyWinCheck out;
  out.k = k;
  out.theta = theta;
  out.delta = delta;
  out.trials = trials;
  out.bound = std::ldexp(1.0, 1 - static_cast<int>(delta));
  std::vector<double> freqs;
  const double good_level = theta + delta;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(stream_seed(seed, t));
    GeometricOrderSource source(k, rng);
    std::uint64_t active = 0, hits = 0;
    while (source.produced() < source.size() && source.remaining(theta + 1) > 0) {
      double v = source.next();
      ++active;
      if (v == good_level) ++hits;
    }
    if (active > 0) freqs.push_back(static_cast<double>(hits) / static_cast<double>(active));
  }
  auto m = mean_and_se(freqs);
  out.used_trials = freqs.size();
  out.mean = m.mean;
  out.se = m.se;
  out.passed = m.mean <= out.bound + 3.0 * m.se;
  return out;
}

mpq_class risky_two_level_exact(unsigned delta) {
  if (delta < 1) throw DomainError("delta must be >= 1");
  mpq_class p(mpz_class(1), power_of_two(delta - 1) + 1);
  p.canonicalize();
  return p;
}

}  // namespace penbench
