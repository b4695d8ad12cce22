#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "penbench/distributions.hpp"
#include "penbench/errors.hpp"
#include "penbench/rng.hpp"

using namespace penbench;
using doctest::Approx;

namespace {

std::vector<DistributionPtr> continuous_catalog() {
  return {std::make_shared<Exponential>(1.0), std::make_shared<Exponential>(2.5),
          std::make_shared<UniformInterval>(0.0, 1.0), std::make_shared<UniformInterval>(1.0, 3.0),
          smooth_if_discrete(std::make_shared<DiscreteWeighted>(std::vector<double>{0, 1, 4},
                                                                std::vector<double>{1, 2, 1}),
                             0.5)};
}

std::vector<DistributionPtr> sampling_catalog() {
  auto laws = continuous_catalog();
  laws.push_back(std::make_shared<TruncatedExponential>(1.5));
  laws.push_back(std::make_shared<DiscreteWeighted>(std::vector<double>{0, 2, 3}, std::vector<double>{1, 1, 2}));
  return laws;
}

}  // namespace

TEST_CASE("exponential quantiles") {
  Exponential e(1.0);
  CHECK(e.upper_quantile(1.0) == 0.0);
  CHECK(e.upper_quantile(0.5) == Approx(std::log(2.0)).epsilon(1e-15));
  Exponential fast(4.0);
  CHECK(fast.upper_quantile(0.25) == Approx(std::log(4.0) / 4.0).epsilon(1e-15));
  CHECK_THROWS_AS(e.upper_quantile(0.0), DomainError);
  CHECK_THROWS_AS(e.upper_quantile(1.5), DomainError);
  CHECK_THROWS_AS(e.upper_quantile(-0.1), DomainError);
  CHECK_THROWS_AS(Exponential(0.0), ValidationError);
}

TEST_CASE("truncated exponential quantile with its atom") {
  double cap = std::log(4.0) / 2.0;
  TruncatedExponential t(cap);
  double oracle = std::min(std::log(1.0 / 0.4), cap);
  CHECK(t.upper_quantile(0.4) == Approx(oracle).epsilon(1e-12));
  CHECK(t.upper_quantile(0.4) == Approx(0.693147).epsilon(1e-6));
  CHECK(t.upper_quantile(0.6) == Approx(std::log(1.0 / 0.6)).epsilon(1e-12));
  CHECK(*t.mean() == Approx(1.0 - std::exp(-cap)).epsilon(1e-12));

  // Monte Carlo survival on both sides of the returned point.
  Rng rng(21);
  const int draws = 200000;
  int above = 0, above_below_tau = 0;
  double tau = t.upper_quantile(0.4);
  for (int i = 0; i < draws; ++i) {
    double x = t.sample(rng);
    CHECK(x <= cap);
    above += x > tau;
    above_below_tau += x > tau - 1e-3;
  }
  CHECK(above / double(draws) <= 0.4);
  CHECK(above_below_tau / double(draws) > 0.4);
}

TEST_CASE("max-law quantile") {
  std::vector<DistributionPtr> pair{std::make_shared<UniformInterval>(0.0, 1.0),
                                    std::make_shared<UniformInterval>(0.0, 1.0)};
  CHECK(max_law_upper_quantile(pair, 0.5) == Approx(std::sqrt(0.5)).epsilon(1e-9));
  std::vector<DistributionPtr> one{std::make_shared<Exponential>(1.0)};
  CHECK(max_law_upper_quantile(one, 0.5) == Approx(std::log(2.0)).epsilon(1e-9));
  CHECK(max_law_upper_quantile(one, 1.0) == 0.0);

  auto e = std::make_shared<Exponential>(1.0);
  std::vector<DistributionPtr> many(64, e);
  double tau = max_law_upper_quantile(many, 0.5);
  double closed = -std::log(1.0 - std::pow(0.5, 1.0 / 64));
  CHECK(tau == Approx(closed).epsilon(1e-9));

  Rng rng(22);
  const int trials = 1000000;
  std::vector<double> maxima(trials);
  for (auto& m : maxima) {
    double u = 1.0;
    for (int i = 0; i < 64; ++i) u = std::min(u, rng.uniform_open_closed());
    m = -std::log(u);
  }
  std::nth_element(maxima.begin(), maxima.begin() + trials / 2, maxima.end());
  CHECK(std::abs(maxima[trials / 2] - tau) < 0.01);
  CHECK_THROWS_AS(max_law_upper_quantile(many, 0.0), DomainError);
}

TEST_CASE("empirical laws") {
  auto two = empirical_from_samples({2});
  Rng rng(23);
  for (int i = 0; i < 10; ++i) CHECK(two->sample(rng) == 2);
  CHECK(*empirical_from_samples({1, 3})->mean() == 2);
  CHECK(empirical_from_samples({0, 0, 6})->survival(0) == Approx(1.0 / 3));
  CHECK_THROWS_AS(empirical_from_samples({}), ValidationError);
  CHECK_THROWS_AS(empirical_from_samples({1, -1}), ValidationError);
}

TEST_CASE("discrete quantiles follow the smallest-tau rule") {
  DiscreteWeighted d({0, 1, 4}, {1, 2, 1});
  CHECK(d.survival(0) == Approx(0.75));
  CHECK(d.survival(1) == Approx(0.25));
  CHECK(d.upper_quantile(1.0) == 0.0);
  CHECK(d.upper_quantile(0.75) == 0.0);
  CHECK(d.upper_quantile(0.5) == 1.0);
  CHECK(d.upper_quantile(0.25) == 1.0);
  CHECK(d.upper_quantile(0.2) == 4.0);
  DiscreteWeighted merged({1, 1, 2}, {1, 1, 2});
  CHECK(merged.atoms().size() == 2);
  CHECK(merged.survival(1) == Approx(0.5));
  CHECK_THROWS_AS(DiscreteWeighted({1}, {0}), ValidationError);
  CHECK(Degenerate(3).upper_quantile(0.5) == 3.0);
  CHECK(Degenerate(3).upper_quantile(1.0) == 0.0);
}

TEST_CASE("quantile and survival round trip on continuous laws") {
  Rng rng(24);
  for (const auto& law : continuous_catalog()) {
    CAPTURE(law->describe());
    for (int i = 0; i < 1000; ++i) {
      double alpha = rng.uniform_open_closed();
      double tau = law->upper_quantile(alpha);
      CHECK(std::abs(law->survival(tau) - alpha) <= 1e-8);
    }
  }
}

TEST_CASE("quantiles are nonincreasing in alpha") {
  for (const auto& law : sampling_catalog()) {
    CAPTURE(law->describe());
    double prev = law->upper_quantile(1e-6);
    for (int i = 1; i <= 200; ++i) {
      double alpha = i / 200.0;
      double tau = law->upper_quantile(alpha);
      CHECK(tau <= prev);
      prev = tau;
    }
    CHECK(law->upper_quantile(1.0) == 0.0);
  }
}

TEST_CASE("sampling matches survival at fixed probes") {
  Rng rng(25);
  const int draws = 1000000;
  for (const auto& law : sampling_catalog()) {
    CAPTURE(law->describe());
    std::vector<double> probes;
    for (double a : {0.9, 0.7, 0.5, 0.3, 0.1}) probes.push_back(law->upper_quantile(a) * 0.97 + 0.01);
    std::vector<int> hits(probes.size());
    for (int i = 0; i < draws; ++i) {
      double x = law->sample(rng);
      CHECK_MESSAGE(x >= 0.0, "negative sample");
      for (std::size_t p = 0; p < probes.size(); ++p) hits[p] += x > probes[p];
    }
    for (std::size_t p = 0; p < probes.size(); ++p) {
      double s = law->survival(probes[p]);
      double se = std::sqrt(std::max(s * (1 - s), 1e-12) / draws);
      CHECK(std::abs(hits[p] / double(draws) - s) <= 3 * se + 1e-12);
    }
  }
}

TEST_CASE("exponential memorylessness") {
  Rng rng(26);
  Exponential e(1.0);
  const int draws = 1000000;
  std::vector<double> xs(draws);
  for (auto& x : xs) x = e.sample(rng);
  for (double t : {0.0, 1.0, 2.0}) {
    double sum = 0;
    int count = 0;
    for (double x : xs) {
      if (x > t) {
        sum += x - t;
        ++count;
      }
    }
    CHECK(sum / count == Approx(1.0).epsilon(0.01));
  }
}

TEST_CASE("smoothing wrapper") {
  auto d = std::make_shared<DiscreteWeighted>(std::vector<double>{1, 2}, std::vector<double>{1, 1});
  auto s = smooth_if_discrete(d);
  CHECK(s->continuous());
  CHECK(dynamic_cast<const Smoothed&>(*s).epsilon() == Approx(2e-9));
  CHECK(*s->mean() == Approx(1.5 + 1e-9));
  CHECK(s->survival(1.0) == Approx(1.0));
  CHECK(s->survival(2.0 + 1e-9) == Approx(0.25));
  CHECK(s->survival(2.0 + 3e-9) == 0.0);
  auto e = std::make_shared<Exponential>(1.0);
  CHECK(smooth_if_discrete(e) == e);
  CHECK(default_smoothing_epsilon(Degenerate(0)) == 1e-9);
}

TEST_CASE("distribution grammar") {
  CHECK(parse_distribution("exp(2)")->upper_quantile(0.5) == Approx(std::log(2.0) / 2));
  CHECK(parse_distribution(" uniform( 0 , 2 ) ")->survival(1) == Approx(0.5));
  CHECK(parse_distribution("truncexp(1)")->upper_quantile(0.1) == 1.0);
  CHECK(parse_distribution("degenerate(3)")->sample(*std::make_unique<Rng>(1)) == 3);
  auto d = parse_distribution("discrete(0:1, 2:3)");
  CHECK(d->survival(0) == Approx(0.75));
  auto s = parse_distribution("smooth(discrete(1:1,2:1), 0.5)");
  CHECK(s->continuous());
  CHECK(s->survival(1.25) == Approx(0.75));
  for (const char* bad : {"exp(", "exp(0)", "exp(-1)", "uniform(2,1)", "foo(1)", "discrete()",
                          "discrete(1:0)", "exp(1) x", "uniform(1)"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_distribution(bad), ConfigError);
  }
  try {
    parse_distribution("exp(1,");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.column() > 0);
  }
}
