#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "penbench/bit_sampling.hpp"
#include "penbench/strategy_common.hpp"

namespace penbench {

/// floor(log2 n) + 2.
std::size_t random_order_k(std::size_t n);
/// 2 floor(log2 n) + 2.
std::size_t arbitrary_order_k(std::size_t n);
/// Smallest k >= 2 with (k - 1) n^{-1/(k-1)} >= 1, i.e. (k-1)^{k-1} >= n.
std::size_t gap_k(std::size_t n);

/// Upper edge of bucket j: (j/k) * ref, exactly ref for j = k.
double bucket_edge(std::size_t j, std::size_t k, double ref);
/// Bucket of a value: 0 for v <= 0, j when edge(j-1) < v <= edge(j), and
/// k + 1 for values above ref.
std::size_t bucket_index(double value, std::size_t k, double ref);

struct BucketProfile {
  std::size_t k = 0;
  double reference = 0.0;
  std::vector<std::size_t> count;     // count[j] for j = 0..k+1 (see bucket_index)
  std::vector<std::size_t> at_least;  // at_least[j] = sum of count[j..k+1], j = 0..k+2

  std::size_t n_j(std::size_t j) const { return count.at(j); }
  std::size_t n_ge(std::size_t j) const { return at_least.at(j); }
};

BucketProfile bucket_profile(const std::vector<double>& values, std::size_t k, double ref);

/// Smallest j in 1..k-1 with n_j < n_{>=j+1} for k = random_order_k(n) and
/// ref = max(values). Throws ContractViolation if none exists.
std::size_t warmup_j_star(const std::vector<double>& values);

/// Full information, random order: one threshold at ((j*-1)/k) a_[1].
class WarmupFullInfo final : public ThresholdStrategy {
 public:
  WarmupFullInfo() : ThresholdStrategy(InfoRegime::full) {}
  Action on_step_begin(std::size_t index) override;
  std::optional<std::size_t> j_star() const { return j_star_; }

 protected:
  double choose_threshold(const PublicContext& context) override;

 private:
  std::optional<std::size_t> j_star_;
  bool accept_all_ = false;
};

/// Random-j single threshold ((j-1)/k) * ref with j uniform in 1..k-1. The
/// reference is a_[1] (optimum regime) or a hint (hint regime).
class RandomBucketThreshold final : public ThresholdStrategy {
 public:
  RandomBucketThreshold(InfoRegime regime, Rng rng);
  std::optional<std::size_t> j() const { return j_; }

 protected:
  double choose_threshold(const PublicContext& context) override;

 private:
  Rng rng_;
  std::optional<std::size_t> j_;
};

StrategyPtr optimum_info_random_order(Rng rng);
StrategyPtr hinted_random_order(Rng rng);

/// No information, random order: observes the first floor(n/2) options, sets
/// the hint to their maximum, then runs the hinted strategy or a single
/// threshold at the hint on the rest, by a fair coin. n = 1 accepts untested.
class NoInfoRandomOrder final : public Strategy {
 public:
  explicit NoInfoRandomOrder(Rng rng);

  InfoRegime regime() const override { return InfoRegime::none; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  std::optional<double> hint() const { return hint_; }
  bool hinted_branch() const { return hinted_branch_; }

 private:
  Rng rng_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  double observed_max_ = 0.0;
  std::optional<double> hint_;
  bool hinted_branch_ = false;
  StrategyPtr inner_;
};

/// Arbitrary order with a hint, driven by the bit-sampling player.
class ArbitraryOrderHinted final : public Strategy {
 public:
  /// `forced_j` pins j* (for tests); otherwise j* is uniform in 1..k-1.
  explicit ArbitraryOrderHinted(Rng rng, std::optional<std::size_t> forced_j = std::nullopt);

  InfoRegime regime() const override { return InfoRegime::hint; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  std::size_t k() const { return k_; }
  std::size_t j_star() const { return j_star_; }
  double threshold() const { return theta_; }
  double follow_up() const { return follow_up_; }
  const BitSampler& sampler() const { return sampler_; }
  /// Bits fed to the sampler so far.
  const BitSequence& bits() const { return bits_; }

 private:
  enum class Phase { first_test, follow_up };

  Rng rng_;
  std::optional<std::size_t> forced_j_;
  BitSampler sampler_;
  BitSequence bits_;
  std::size_t k_ = 0;
  std::size_t j_star_ = 0;
  double theta_ = 0.0;
  double follow_up_ = 0.0;
  Phase phase_ = Phase::first_test;
};

/// Full information: observes options until some bucket j in 1..k-1 is empty
/// among unseen values while an unseen value lies above it, then tests every
/// later option at the bucket's lower edge.
class GapAlgorithm final : public Strategy {
 public:
  GapAlgorithm() = default;

  InfoRegime regime() const override { return InfoRegime::full; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  std::size_t k() const { return k_; }
  std::optional<double> armed_threshold() const { return armed_; }
  std::optional<std::size_t> armed_bucket() const { return armed_bucket_; }
  std::optional<std::size_t> armed_at_step() const { return armed_step_; }

 private:
  void try_arm(std::size_t index);

  std::size_t k_ = 0;
  double reference_ = 0.0;
  std::vector<std::size_t> unseen_;  // per bucket, indices 0..k
  std::optional<double> armed_;
  std::optional<std::size_t> armed_bucket_;
  std::optional<std::size_t> armed_step_;
};

StrategyPtr warmup_full_info();
StrategyPtr no_info_random_order(Rng rng);
StrategyPtr arbitrary_order_hinted(Rng rng, std::optional<std::size_t> forced_j = std::nullopt);
StrategyPtr gap_algorithm();
StrategyPtr baseline_uniform(Rng rng);

}  // namespace penbench
