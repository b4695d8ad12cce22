#pragma once

#include <memory>
#include <optional>

#include "penbench/engine.hpp"
#include "penbench/rng.hpp"

namespace penbench {

using StrategyPtr = std::unique_ptr<Strategy>;

/// Picks one threshold when the game begins, then tests every option once at
/// it: accept on pass, reject on fail.
class ThresholdStrategy : public Strategy {
 public:
  explicit ThresholdStrategy(InfoRegime regime) : regime_(regime) {}

  InfoRegime regime() const override { return regime_; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  /// The threshold in use; empty before begin().
  std::optional<double> threshold() const { return theta_; }

 protected:
  virtual double choose_threshold(const PublicContext& context) = 0;

 private:
  InfoRegime regime_;
  std::optional<double> theta_;
};

class FixedThreshold final : public ThresholdStrategy {
 public:
  explicit FixedThreshold(double theta, InfoRegime regime = InfoRegime::none);

 protected:
  double choose_threshold(const PublicContext&) override { return theta_; }

 private:
  double theta_;
};

/// Runs `first` with probability p and `second` otherwise; the coin is tossed
/// in begin(). Both branches must consume the same information regime.
class Mixture final : public Strategy {
 public:
  Mixture(StrategyPtr first, StrategyPtr second, Rng rng, double p_first = 0.5);

  InfoRegime regime() const override { return first_->regime(); }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  /// Which branch was drawn; empty before begin().
  std::optional<bool> chose_first() const { return chose_first_; }
  const Strategy& first() const { return *first_; }
  const Strategy& second() const { return *second_; }

 private:
  Strategy& active();

  StrategyPtr first_;
  StrategyPtr second_;
  Rng rng_;
  double p_first_;
  std::optional<bool> chose_first_;
};

/// Accepts one option chosen uniformly at the start, untested; rejects the rest.
class BaselineUniform final : public Strategy {
 public:
  explicit BaselineUniform(Rng rng) : rng_(rng) {}

  InfoRegime regime() const override { return InfoRegime::none; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome&) override { return Action::reject(); }

  std::size_t chosen() const { return chosen_; }

 private:
  Rng rng_;
  std::size_t chosen_ = 0;
};

StrategyPtr single_threshold_strategy(double theta, InfoRegime regime = InfoRegime::none);

/// Payload accessors; throw ConfigError when the payload has another type.
const FullInfo& full_info(const PublicContext& context);
const OptimumInfo& optimum_info(const PublicContext& context);
const HintInfo& hint_info(const PublicContext& context);
const DistributionInfo& distribution_info(const PublicContext& context);
const SampleInfo& sample_info(const PublicContext& context);

}  // namespace penbench
