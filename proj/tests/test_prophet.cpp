#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "penbench/distributions.hpp"
#include "penbench/errors.hpp"
#include "penbench/prophet_algs.hpp"
#include "penbench/rng.hpp"
#include "support/oracles.hpp"
#include "support/test_util.hpp"

using namespace penbench;
using doctest::Approx;

namespace {

PublicContext law_context(std::vector<DistributionPtr> laws) {
  std::size_t n = laws.size();
  return {n, DistributionInfo{std::move(laws)}};
}

PublicContext iid_context(DistributionPtr law, std::size_t n) {
  return law_context(std::vector<DistributionPtr>(n, std::move(law)));
}

std::vector<double> draw(const std::vector<DistributionPtr>& laws, Rng& rng) {
  std::vector<double> v;
  for (const auto& law : laws) v.push_back(law->sample(rng));
  return v;
}

}  // namespace

TEST_CASE("single threshold strategy") {
  auto ctx = test_util::no_info(2);
  auto a = single_threshold_strategy(2);
  auto r = test_util::play_values({1, 5}, *a, ctx);
  CHECK(r.accepted_index == 2u);
  CHECK(r.score == 3);
  auto b = single_threshold_strategy(2);
  r = test_util::play_values({3, 5}, *b, ctx);
  CHECK(r.accepted_index == 1u);
  CHECK(r.score == 1);
  auto c = single_threshold_strategy(2);
  r = test_util::play_values({1, 1}, *c, ctx);
  CHECK_FALSE(r.accepted_index.has_value());
  CHECK(r.score == 0);
}

TEST_CASE("first i.i.d. algorithm") {
  auto e = std::make_shared<Exponential>(1.0);
  auto ctx = iid_context(e, 8);
  IidFirst first;
  first.begin(ctx);
  CHECK(*first.threshold() == Approx(std::log(8.0)).epsilon(1e-12));

  const int trials = 100000;
  std::vector<DistributionPtr> laws(8, e);
  int accepted = 0;
  std::vector<double> conditional;
  Rng rng(51);
  for (int t = 0; t < trials; ++t) {
    IidFirst s;
    auto r = test_util::play_values(draw(laws, rng), s, ctx);
    if (r.accepted_index) {
      ++accepted;
      conditional.push_back(r.score);
    }
  }
  double oracle = 1 - std::pow(7.0 / 8.0, 8);
  CHECK(std::abs(accepted / double(trials) - oracle) < 0.005);
  CHECK(std::abs(test_util::stats_of(conditional).mean - 1.0) < 0.01);
}

TEST_CASE("second i.i.d. algorithm") {
  auto e = std::make_shared<Exponential>(1.0);
  auto grid = quantile_grid(*e, 8);
  CHECK(grid.k == 3);
  CHECK(grid.alphas == std::vector<double>{1, 0.5, 0.25});
  for (std::size_t j = 1; j < grid.taus.size(); ++j) CHECK(grid.taus[j] >= grid.taus[j - 1]);

  auto ctx = iid_context(e, 8);
  std::vector<DistributionPtr> laws(8, e);
  std::vector<double> scores;
  Rng rng(52);
  for (int t = 0; t < 100000; ++t) {
    IidSecond s(rng.split(1));
    scores.push_back(test_util::play_values(draw(laws, rng), s, ctx).score);
  }
  double floor = (1 - std::exp(-1.0)) * std::log(8.0) / 6;
  CHECK(test_util::stats_of(scores).mean >= floor - 0.01);

  UniformInterval u(0, 1);
  auto ugrid = quantile_grid(u, 4);
  CHECK(ugrid.k == 2);
  for (std::size_t j = 0; j < ugrid.k; ++j) {
    CHECK(ugrid.taus[j] < 1.0);
    double alpha = u.survival(ugrid.taus[j]);
    CHECK(alpha == Approx(ugrid.alphas[j]));
    CHECK(1 - std::pow(1 - alpha, 4) >= 1 - std::exp(-1.0));
  }
  CHECK(quantile_grid(u, 1).k == 1);
}

TEST_CASE("mixture branches replay their components") {
  auto e = std::make_shared<Exponential>(1.0);
  auto ctx = iid_context(e, 16);
  std::vector<DistributionPtr> laws(16, e);
  Rng rng(53);
  int heads = 0;
  for (int t = 0; t < 200; ++t) {
    auto values = draw(laws, rng);
    std::uint64_t seed = rng.next();
    auto mix = iid_mixture(Rng(seed));
    test_util::Recorder rec_mix(*mix);
    test_util::play_values(values, rec_mix, ctx);
    const auto& m = dynamic_cast<const Mixture&>(*mix);
    if (*m.chose_first()) {
      ++heads;
      IidFirst first;
      test_util::Recorder rec(first);
      test_util::play_values(values, rec, ctx);
      CHECK(rec.actions() == rec_mix.actions());
    }
  }
  CHECK(heads > 60);
  CHECK(heads < 140);
}

TEST_CASE("mixture on a single option accepts at zero") {
  auto e = std::make_shared<Exponential>(1.0);
  auto ctx = iid_context(e, 1);
  std::vector<double> scores;
  Rng rng(54);
  for (int t = 0; t < 20000; ++t) {
    auto mix = iid_mixture(rng.split(1));
    std::vector<double> v{e->sample(rng)};
    auto r = test_util::play_values(v, *mix, ctx);
    CHECK(r.accepted_index == 1u);
    CHECK(r.score == v[0]);
    scores.push_back(r.score);
  }
  CHECK(test_util::stats_of(scores).mean == Approx(1.0).epsilon(0.03));
}

TEST_CASE("mixture ratio on exponential, n = 1024") {
  auto e = std::make_shared<Exponential>(1.0);
  const std::size_t n = 1024;
  auto ctx = iid_context(e, n);
  std::vector<DistributionPtr> laws(n, e);
  std::vector<double> scores;
  Rng rng(55);
  for (int t = 0; t < 100000; ++t) {
    auto mix = iid_mixture(Rng(stream_seed(55, t, 1)));
    Rng values_rng(stream_seed(55, t, 0));
    scores.push_back(test_util::play_values(draw(laws, values_rng), *mix, ctx).score);
  }
  double h = oracle_ref::harmonic_naive(n).get_d();
  double ratio = h / test_util::stats_of(scores).mean;
  MESSAGE("iid-mix ratio at n=1024: " << ratio);
  CHECK(ratio <= 2 * std::exp(1.0) * std::log(double(n)));
}

TEST_CASE("refined plan at n = 55") {
  auto plan = refined_plan(55);
  double x = std::sqrt(std::log(55.0)) / 55.0;
  CHECK(plan.x == Approx(x).epsilon(1e-14));
  CHECK(plan.x == Approx(0.036397).epsilon(1e-4));
  CHECK(plan.k == static_cast<std::size_t>(std::ceil(std::log(1.0 / x))));
  CHECK(plan.k == 4);
  REQUIRE(plan.alphas.size() == plan.k + 1);
  for (std::size_t j = 0; j <= plan.k; ++j) {
    CHECK(plan.alphas[j] == Approx(std::pow(x, double(j) / plan.k)).epsilon(1e-12));
  }
  double hit = 1 - std::pow(1 - plan.alphas[plan.k], 55.0);
  std::vector<double> c(plan.k + 1);
  for (std::size_t j = 0; j < plan.k; ++j) c[j] = hit * plan.alphas[j + 1] / plan.alphas[j];
  c[plan.k] = hit / (55.0 * plan.alphas[plan.k]);
  double gamma = 0;
  for (double cj : c) gamma += 1 / cj;
  double total = 0;
  for (std::size_t j = 0; j <= plan.k; ++j) {
    CHECK(plan.c[j] == Approx(c[j]).epsilon(1e-10));
    CHECK(plan.weights[j] == Approx((1 / c[j]) / gamma).epsilon(1e-10));
    total += plan.weights[j];
  }
  CHECK(total == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS(refined_plan(2));
}

TEST_CASE("upper bound on the expected maximum via a single threshold") {
  auto e = std::make_shared<Exponential>(1.0);
  const std::size_t n = 32;
  std::vector<double> maxima;
  Rng rng(56);
  for (int t = 0; t < 100000; ++t) {
    double m = 0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, e->sample(rng));
    maxima.push_back(m);
  }
  auto s = test_util::stats_of(maxima);
  for (double theta : {0.0, 1.0, e->upper_quantile(1.0 / n)}) {
    double bound = theta + double(n) * std::exp(-theta);
    CHECK(s.mean <= bound + 3 * s.se);
  }
}

TEST_CASE("mean residual above a quantile covers half the quantile gap") {
  std::vector<DistributionPtr> laws{std::make_shared<Exponential>(1.0), std::make_shared<Exponential>(3.0),
                                    std::make_shared<UniformInterval>(0.0, 1.0),
                                    std::make_shared<UniformInterval>(2.0, 5.0),
                                    smooth_if_discrete(parse_distribution("discrete(0:1,1:1,3:2)"), 0.25)};
  Rng rng(57);
  for (const auto& law : laws) {
    CAPTURE(law->describe());
    std::vector<double> xs(400000);
    for (auto& x : xs) x = law->sample(rng);
    for (double alpha : {0.5, 0.25, 0.125}) {
      double tau = law->upper_quantile(alpha);
      double half_gap = (law->upper_quantile(alpha / 2) - tau) / 2;
      std::vector<double> excess;
      for (double x : xs) {
        if (x > tau) excess.push_back(x - tau);
      }
      auto s = test_util::stats_of(excess);
      CHECK(s.mean >= half_gap - 3 * s.se);
    }
  }
}

TEST_CASE("block partition is a chronological cover") {
  for (std::size_t size = 1; size <= 64; ++size) {
    std::vector<std::size_t> members(size);
    for (std::size_t i = 0; i < size; ++i) members[i] = 3 * i + 1;
    for (std::size_t block : {1u, 2u, 4u, 8u}) {
      auto blocks = block_partition(members, block);
      std::vector<std::size_t> joined;
      for (std::size_t b = 0; b < blocks.size(); ++b) {
        REQUIRE_FALSE(blocks[b].empty());
        if (b + 1 < blocks.size()) {
          CHECK(blocks[b].size() == block);
          CHECK(blocks[b].back() < blocks[b + 1].front());
        } else {
          CHECK(blocks[b].size() <= block);
        }
        joined.insert(joined.end(), blocks[b].begin(), blocks[b].end());
      }
      CHECK(joined == members);
    }
  }
}

TEST_CASE("tail grouping of a uniform pair") {
  auto u = std::make_shared<UniformInterval>(0.0, 1.0);
  auto profile = tail_group_profile({u, u});
  CHECK(profile.tau_half == Approx(std::sqrt(0.5)).epsilon(1e-9));
  CHECK(profile.alphas[0] == Approx(1 - std::sqrt(0.5)).epsilon(1e-9));
  CHECK(profile.alphas[1] == Approx(1 - std::sqrt(0.5)).epsilon(1e-9));
  CHECK(profile.k == 1);
  CHECK(profile.j_star == 1);
  CHECK(profile.groups[1] == std::vector<std::size_t>{1, 2});
  double total = std::accumulate(profile.weights.begin(), profile.weights.end(), 0.0);
  CHECK(total == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tail grouping invariants on mixed laws") {
  Rng rng(58);
  for (int t = 0; t < 30; ++t) {
    std::size_t n = 1 + rng.below(40);
    std::vector<DistributionPtr> laws;
    for (std::size_t i = 0; i < n; ++i) {
      double r = rng.uniform();
      if (r < 0.4) laws.push_back(std::make_shared<Exponential>(0.2 + 3 * rng.uniform()));
      else if (r < 0.8) laws.push_back(std::make_shared<UniformInterval>(0.0, 0.1 + 5 * rng.uniform()));
      else laws.push_back(smooth_if_discrete(std::make_shared<Degenerate>(std::floor(10 * rng.uniform()))));
    }
    auto profile = tail_group_profile(laws);
    double sum_alpha = std::accumulate(profile.alphas.begin(), profile.alphas.end(), 0.0);
    CHECK(sum_alpha >= 0.5 - 1e-6);
    double share = profile.groups[profile.j_star].size() / std::ldexp(1.0, int(profile.j_star));
    CHECK(share >= 1.0 / (4.0 * double(profile.k + 2)) - 1e-12);
    double total = std::accumulate(profile.weights.begin(), profile.weights.end(), 0.0);
    CHECK(total == Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("general algorithm on the point-mass ladder") {
  std::vector<DistributionPtr> laws;
  for (int i = 1; i <= 8; ++i) laws.push_back(std::make_shared<Degenerate>(double(i)));
  auto ctx = law_context(laws);
  auto plan = general_prophet_plan(laws);
  std::vector<double> values(8);
  std::iota(values.begin(), values.end(), 1.0);

  std::vector<double> block_scores, threshold_scores;
  for (std::uint64_t seed = 0; seed < 40000; ++seed) {
    GeneralProphet s(Rng(stream_seed(59, seed)), {}, plan);
    auto r = test_util::play_values(values, s, ctx);
    (s.block_branch() ? block_scores : threshold_scores).push_back(r.score);
  }
  double block = test_util::stats_of(block_scores).mean;
  double single = test_util::stats_of(threshold_scores).mean;
  MESSAGE("ladder: block branch " << block << ", threshold branch " << single);
  CHECK(block >= 1.0);
  CHECK(single <= 1.0 + 1e-6);

  // Any single threshold scores at most 1 + epsilon on the ladder.
  for (double theta = 0; theta <= 8; theta += 0.125) {
    FixedThreshold f(theta, InfoRegime::distributions);
    CHECK(test_util::play_values(values, f, ctx).score <= 1.0 + 1e-6);
  }
}

TEST_CASE("threshold branch of the general algorithm on a uniform pair") {
  auto u = std::make_shared<UniformInterval>(0.0, 1.0);
  std::vector<DistributionPtr> laws{u, u};
  auto ctx = law_context(laws);
  auto plan = general_prophet_plan(laws);
  double c = std::sqrt(0.5);
  double lower = 0.5 * 2 * (1 - c) * (1 - c) / 2;  // half the summed expected excess over c
  double exact = (1 - c) * (1 - c) / 2 * (1 + c);  // first pass over two independent tries
  std::vector<double> scores;
  Rng rng(60);
  for (std::uint64_t t = 0; scores.size() < 400000; ++t) {
    GeneralProphet s(rng.split(1), {}, plan);
    auto r = test_util::play_values(draw(laws, rng), s, ctx);
    if (!s.block_branch()) scores.push_back(r.score);
  }
  auto stats = test_util::stats_of(scores);
  CHECK(stats.mean >= lower - 3 * stats.se);
  CHECK(std::abs(stats.mean - exact) <= 4 * stats.se);
  CHECK(lower == Approx(0.04289).epsilon(1e-3));
}

TEST_CASE("single-sample algorithm") {
  PublicContext ctx{2, SampleInfo{{0.5, 1.2}}};
  bool saw_threshold_branch = false;
  for (std::uint64_t seed = 0; seed < 50 && !saw_threshold_branch; ++seed) {
    SingleSampleProphet s{Rng(seed)};
    auto r = test_util::play_values({1.0, 2.0}, s, ctx);
    CHECK(s.hint() == 1.2);
    if (!s.hinted_branch()) {
      saw_threshold_branch = true;
      CHECK(r.accepted_index == 2u);
      CHECK(r.score == Approx(0.8));
    }
  }
  CHECK(saw_threshold_branch);
  SingleSampleProphet empty{Rng(1)};
  CHECK_THROWS(empty.begin(PublicContext{0, SampleInfo{}}));
}

TEST_CASE("hint from one sample per option lands between the max-law terciles") {
  auto e = std::make_shared<Exponential>(1.0);
  std::vector<DistributionPtr> laws{e, e};
  double a = -std::log(1 - std::sqrt(1.0 / 3));
  double b = -std::log(1 - std::sqrt(2.0 / 3));
  CHECK(max_law_upper_quantile(laws, 2.0 / 3) == Approx(a).epsilon(1e-9));
  CHECK(max_law_upper_quantile(laws, 1.0 / 3) == Approx(b).epsilon(1e-9));
  Rng rng(61);
  const int trials = 100000;
  int inside = 0;
  for (int t = 0; t < trials; ++t) {
    double hint = std::max(e->sample(rng), e->sample(rng));
    inside += hint >= a && hint <= b;
  }
  CHECK(std::abs(inside / double(trials) - 1.0 / 3) < 0.01);
}

TEST_CASE("discrete laws are smoothed before quantiles unless disabled") {
  auto d = parse_distribution("discrete(0:1,5:1)");
  CHECK(quantile_law(d, {})->continuous());
  CHECK(quantile_law(d, {false, 0.0}) == d);
  auto ctx = iid_context(d, 4);
  IidFirst smooth;
  smooth.begin(ctx);
  IidFirst raw({false, 0.0});
  raw.begin(ctx);
  CHECK(*raw.threshold() == 5.0);
  CHECK(*smooth.threshold() > 5.0);
  CHECK(*smooth.threshold() < 5.0 + 1e-8);
}
