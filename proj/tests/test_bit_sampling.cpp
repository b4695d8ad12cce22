#include <doctest.h>

#include <cmath>
#include <string>

#include "penbench/bit_sampling.hpp"
#include "penbench/errors.hpp"
#include "penbench/rng.hpp"
#include "support/oracles.hpp"

using namespace penbench;

TEST_CASE("commit probability") {
  CHECK(commit_probability(0) == 0.25);
  CHECK(commit_probability(2) == 1.0 / 16);
  CHECK(commit_probability(-2) == 1.0);
  CHECK(commit_probability(-7) == 1.0);
  CHECK(commit_probability(-1) == 0.5);
  CHECK(commit_probability_exact(0) == mpq_class(1, 4));
  CHECK(commit_probability_exact(5) == mpq_class(1, 128));
  CHECK(commit_probability_exact(0, 3) == mpq_class(1, 8));
}

TEST_CASE("bit sequences") {
  CHECK(is_valid_sequence(parse_bits("1")));
  CHECK(is_valid_sequence(parse_bits("011")));
  CHECK_FALSE(is_valid_sequence(parse_bits("01")));
  CHECK_FALSE(is_valid_sequence(parse_bits("0011")));
  CHECK(bits_to_string(parse_bits("10110")) == "10110");
  CHECK_THROWS_AS(parse_bits("012"), ValidationError);
  CHECK(parse_bits("").empty());
  CHECK_FALSE(is_valid_sequence(parse_bits("")));
}

TEST_CASE("exact win probability matches the reference sum") {
  CHECK(*exact_win_prob(parse_bits("1")).exact == mpq_class(1, 4));
  CHECK(*exact_win_prob(parse_bits("11")).exact == mpq_class(5, 8));
  CHECK(*exact_win_prob(parse_bits("011")).exact == mpq_class(33, 128));
  CHECK(oracle_ref::win_probability("011") == mpq_class(33, 128));
  Rng rng(41);
  for (int t = 0; t < 300; ++t) {
    std::size_t m = 1 + rng.below(40);
    std::string bits;
    for (std::size_t i = 0; i < m; ++i) bits += rng.coin() ? '1' : '0';
    if (!oracle_ref::valid_bits(bits)) continue;
    auto p = exact_win_prob(parse_bits(bits));
    CHECK(*p.exact == oracle_ref::win_probability(bits));
    CHECK(std::abs(double(p.value) - p.exact->get_d()) < 1e-15);
  }
}

TEST_CASE("long sequences fall back to floating point") {
  auto p = exact_win_prob(BitSequence(10001, 1));
  CHECK_FALSE(p.exact.has_value());
  CHECK(std::abs(double(p.value) - 1.0) < 1e-12);

  std::string text = "1";
  for (int i = 0; i < 5000; ++i) text += "10";
  auto q = exact_win_prob(parse_bits(text));
  CHECK_FALSE(q.exact.has_value());
  CHECK(std::abs(double(q.value) - oracle_ref::win_probability(text).get_d()) < 1e-12);
}

TEST_CASE("play_game rejects invalid sequences") {
  Rng rng(42);
  CHECK_THROWS_AS(play_game(parse_bits("0"), rng), ValidationError);
  CHECK_THROWS_AS(play_game(parse_bits("01"), rng), ValidationError);
}

TEST_CASE("simulated win frequency agrees with the exact value") {
  Rng pick(43);
  int sequences = 0;
  while (sequences < 50) {
    std::size_t m = 1 + pick.below(100);
    std::string bits;
    for (std::size_t i = 0; i < m; ++i) bits += pick.uniform() < 0.6 ? '1' : '0';
    if (!oracle_ref::valid_bits(bits)) continue;
    ++sequences;
    auto seq = parse_bits(bits);
    double exact = exact_win_prob(seq).exact->get_d();
    const int trials = 1000000;
    Rng rng(stream_seed(44, sequences));
    int wins = 0;
    for (int t = 0; t < trials; ++t) wins += play_game(seq, rng);
    double freq = wins / double(trials);
    double se = std::sqrt(exact * (1 - exact) / trials);
    CAPTURE(bits);
    CHECK(std::abs(freq - exact) <= 3 * se + 1e-9);
  }
}

TEST_CASE("exhaustive minimum") {
  auto one = min_win_prob_exhaustive(1);
  CHECK(one.minimum == mpq_class(1, 4));
  CHECK(bits_to_string(one.witness) == "1");

  auto three = min_win_prob_exhaustive(3);
  mpq_class ref = 1;
  for (const char* s : {"1", "11", "011", "101", "110", "111"}) ref = std::min(ref, oracle_ref::win_probability(s));
  CHECK(three.minimum == ref);
  CHECK(three.sequences_checked == 6);
  CHECK(three.minimum >= mpq_class(1, 6));

  auto fourteen = min_win_prob_exhaustive(14);
  CHECK(fourteen.minimum >= mpq_class(1, 6));
  CHECK(oracle_ref::win_probability(bits_to_string(fourteen.witness)) == fourteen.minimum);
  CHECK_THROWS(min_win_prob_exhaustive(0));
  CHECK_THROWS(min_win_prob_exhaustive(21));
}

TEST_CASE("every valid sequence of length at most 16 wins with probability at least 1/6") {
  CHECK(min_win_prob_exhaustive(16).minimum >= mpq_class(1, 6));
}

TEST_CASE("inductive bound") {
  CHECK(inductive_bound(0) == mpq_class(1, 6));
  CHECK(inductive_bound(1) == mpq_class(1, 4));
  for (long d = 0; d < 60; ++d) {
    CHECK(inductive_bound(d + 1) > inductive_bound(d));
    CHECK(inductive_bound(d) < mpq_class(1, 3));
  }
  CHECK_THROWS_AS(inductive_bound(-1), DomainError);
  auto check = check_inductive_bound(14);
  CHECK(check.holds);
  CHECK(check.states_checked > 0);
}

TEST_CASE("a weaker commit rule breaks the bound") {
  auto tampered = min_win_prob_exhaustive(14, 3);
  CHECK(tampered.minimum < mpq_class(1, 6));
  CHECK_FALSE(check_inductive_bound(14, 3).holds);
}

TEST_CASE("naive length-guessing baseline does worse") {
  auto naive = naive_baseline_min_exhaustive(14);
  CHECK(naive.minimum <= mpq_class(1, 6));
  CHECK(min_win_prob_exhaustive(14).minimum > naive.minimum);
}

TEST_CASE("sampler state") {
  BitSampler s;
  CHECK(s.delta() == 0);
  s.observe(0);
  s.observe(0);
  s.observe(1);
  CHECK(s.delta() == 1);
  CHECK_FALSE(s.committed());
}
