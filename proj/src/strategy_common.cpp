#include "penbench/strategy_common.hpp"

#include "penbench/errors.hpp"

namespace penbench {

void ThresholdStrategy::begin(const PublicContext& context) {
  theta_ = choose_threshold(context);
  Threshold checked(*theta_);
  (void)checked;
}

Action ThresholdStrategy::on_step_begin(std::size_t) {
  if (!theta_) throw ContractViolation("threshold strategy used before begin()");
  return Action::test(*theta_);
}

Action ThresholdStrategy::on_outcome(const StepOutcome& outcome) {
  return outcome.passed() ? Action::accept() : Action::reject();
}

FixedThreshold::FixedThreshold(double theta, InfoRegime regime)
    : ThresholdStrategy(regime), theta_(Threshold(theta).value()) {}

StrategyPtr single_threshold_strategy(double theta, InfoRegime regime) {
  return std::make_unique<FixedThreshold>(theta, regime);
}

Mixture::Mixture(StrategyPtr first, StrategyPtr second, Rng rng, double p_first)
    : first_(std::move(first)), second_(std::move(second)), rng_(rng), p_first_(p_first) {
  if (!first_ || !second_) throw ContractViolation("mixture needs two strategies");
  if (first_->regime() != second_->regime()) {
    throw ContractViolation("mixture branches consume different information regimes");
  }
}

Strategy& Mixture::active() {
  if (!chose_first_) throw ContractViolation("mixture used before begin()");
  return *chose_first_ ? *first_ : *second_;
}

void Mixture::begin(const PublicContext& context) {
  chose_first_ = rng_.bernoulli(p_first_);
  active().begin(context);
}

Action Mixture::on_step_begin(std::size_t index) { return active().on_step_begin(index); }

Action Mixture::on_outcome(const StepOutcome& outcome) { return active().on_outcome(outcome); }

void BaselineUniform::begin(const PublicContext& context) {
  chosen_ = static_cast<std::size_t>(rng_.below(context.n)) + 1;
}

Action BaselineUniform::on_step_begin(std::size_t index) {
  return index == chosen_ ? Action::accept() : Action::reject();
}

namespace {

template <class T>
const T& payload(const PublicContext& context, InfoRegime wanted) {
  if (const T* p = std::get_if<T>(&context.info)) return *p;
  throw ConfigError("strategy needs '" + to_string(wanted) + "' information but the game provides '" +
                    to_string(regime_of(context.info)) + "'");
}

}  // namespace

const FullInfo& full_info(const PublicContext& c) { return payload<FullInfo>(c, InfoRegime::full); }
const OptimumInfo& optimum_info(const PublicContext& c) {
  return payload<OptimumInfo>(c, InfoRegime::optimum);
}
const HintInfo& hint_info(const PublicContext& c) { return payload<HintInfo>(c, InfoRegime::hint); }
const DistributionInfo& distribution_info(const PublicContext& c) {
  return payload<DistributionInfo>(c, InfoRegime::distributions);
}
const SampleInfo& sample_info(const PublicContext& c) {
  return payload<SampleInfo>(c, InfoRegime::samples);
}

}  // namespace penbench
