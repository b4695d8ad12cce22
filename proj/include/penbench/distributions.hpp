#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "penbench/rng.hpp"

namespace penbench {

/// A nonnegative probability law with sampling and quantile inversion.
///
/// upper_quantile(alpha) is the smallest tau >= 0 with P(X > tau) <= alpha.
/// For an atomless law this is the tau with P(X > tau) = alpha; in particular
/// upper_quantile(1) = 0 for every law.
class Distribution {
 public:
  virtual ~Distribution() = default;

  virtual double sample(Rng& rng) const = 0;
  /// Throws DomainError unless alpha is in (0, 1].
  virtual double upper_quantile(double alpha) const = 0;
  /// P(X > x).
  virtual double survival(double x) const = 0;
  /// Empty when the mean is declared unavailable.
  virtual std::optional<double> mean() const = 0;
  virtual bool continuous() const = 0;
  /// Point masses (value, probability) for purely discrete laws; empty otherwise.
  virtual std::vector<std::pair<double, double>> atoms() const { return {}; }
  /// Spec-string form, e.g. "exp(1)".
  virtual std::string describe() const = 0;
};

using DistributionPtr = std::shared_ptr<const Distribution>;

class Exponential final : public Distribution {
 public:
  explicit Exponential(double rate);
  double sample(Rng& rng) const override;
  double upper_quantile(double alpha) const override;
  double survival(double x) const override;
  std::optional<double> mean() const override { return 1.0 / rate_; }
  bool continuous() const override { return true; }
  std::string describe() const override;
  double rate() const { return rate_; }

 private:
  double rate_;
};

/// min{X, cap} with X ~ Exp(1): an atom of mass e^{-cap} at the cap.
class TruncatedExponential final : public Distribution {
 public:
  explicit TruncatedExponential(double cap);
  double sample(Rng& rng) const override;
  double upper_quantile(double alpha) const override;
  double survival(double x) const override;
  std::optional<double> mean() const override;
  bool continuous() const override { return false; }
  std::string describe() const override;
  double cap() const { return cap_; }

 private:
  double cap_;
};

class UniformInterval final : public Distribution {
 public:
  UniformInterval(double low, double high);
  double sample(Rng& rng) const override;
  double upper_quantile(double alpha) const override;
  double survival(double x) const override;
  std::optional<double> mean() const override { return 0.5 * (low_ + high_); }
  bool continuous() const override { return true; }
  std::string describe() const override;

 private:
  double low_;
  double high_;
};

/// Finite law over values v_j with positive weights w_j (normalized internally).
class DiscreteWeighted : public Distribution {
 public:
  DiscreteWeighted(std::vector<double> values, std::vector<double> weights);
  double sample(Rng& rng) const override;
  double upper_quantile(double alpha) const override;
  double survival(double x) const override;
  std::optional<double> mean() const override { return mean_; }
  bool continuous() const override { return false; }
  std::vector<std::pair<double, double>> atoms() const override;
  std::string describe() const override;

 protected:
  std::vector<double> values_;      // sorted ascending, distinct
  std::vector<double> probs_;       // matching probabilities
  std::vector<double> cumulative_;  // cumulative_[j] = P(X <= values_[j])
  double mean_ = 0.0;
};

class Degenerate final : public DiscreteWeighted {
 public:
  explicit Degenerate(double value);
  double sample(Rng&) const override { return values_.front(); }
  std::string describe() const override;
};

/// Uniform law over a multiset of observed samples.
class Empirical final : public DiscreteWeighted {
 public:
  explicit Empirical(std::vector<double> samples);
  double sample(Rng& rng) const override;
  std::string describe() const override;

 private:
  std::vector<double> samples_;
};

/// Continuity reduction for discrete laws: X + U with U ~ Uniform[0, eps)
/// independent of X. Survival is piecewise linear, quantiles are inverted
/// exactly per linear piece.
class Smoothed final : public Distribution {
 public:
  Smoothed(DistributionPtr base, double epsilon);
  double sample(Rng& rng) const override;
  double upper_quantile(double alpha) const override;
  double survival(double x) const override;
  std::optional<double> mean() const override;
  bool continuous() const override { return true; }
  std::string describe() const override;
  double epsilon() const { return epsilon_; }

 private:
  DistributionPtr base_;
  std::vector<std::pair<double, double>> atoms_;
  double epsilon_;
};

/// Default smoothing width: 1e-9 times the largest atom magnitude (at least 1e-9).
double default_smoothing_epsilon(const Distribution& law);

/// Wraps `law` in Smoothed when it has atoms; returns it unchanged otherwise.
/// `epsilon` <= 0 selects default_smoothing_epsilon.
DistributionPtr smooth_if_discrete(DistributionPtr law, double epsilon = 0.0);

/// Smallest tau >= 0 with P(X > tau) <= alpha.
double upper_quantile(const Distribution& law, double alpha);

/// Smallest tau with prod_i (1 - survival_i(tau)) >= 1 - alpha, i.e. the
/// upper alpha-quantile of the maximum of independent draws. Bracket grown
/// geometrically from [0, 1], then bisection down to adjacent doubles (well
/// inside 1e-9). Throws NumericError if 200 steps do not suffice.
double max_law_upper_quantile(std::span<const DistributionPtr> laws, double alpha);

/// P(max_i X_i <= x) for independent X_i.
double max_law_cdf(std::span<const DistributionPtr> laws, double x);

/// Throws ValidationError on an empty list or negative entries.
DistributionPtr empirical_from_samples(std::vector<double> samples);

/// Distribution spec mini-language (docs/distribution_grammar.md):
///   exp(rate) | truncexp(cap) | uniform(a,b) | discrete(v1:w1, v2:w2, ...)
///   | degenerate(v) | smooth(<dist>[, eps])
/// Throws ConfigError with a column on malformed input.
DistributionPtr parse_distribution(std::string_view text);

struct SpecNode;
DistributionPtr distribution_from_node(const SpecNode& node);

}  // namespace penbench
