#include "penbench/secretary_algs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "penbench/errors.hpp"

namespace penbench {

namespace {

std::size_t floor_log2(std::size_t n) {
  if (n == 0) throw ValidationError("n must be positive");
  return static_cast<std::size_t>(std::bit_width(n)) - 1;
}

}  // namespace

std::size_t random_order_k(std::size_t n) { return floor_log2(n) + 2; }

std::size_t arbitrary_order_k(std::size_t n) { return 2 * floor_log2(n) + 2; }

std::size_t gap_k(std::size_t n) {
  if (n == 0) throw ValidationError("n must be positive");
  for (std::size_t k = 2;; ++k) {
    // (k-1)^{k-1} >= n, computed with early exit instead of overflow.
    std::size_t base = k - 1;
    std::size_t power = 1;
    bool exceeded = false;
    for (std::size_t e = 0; e < base && !exceeded; ++e) {
      if (power > n / base) exceeded = true;
      else power *= base;
    }
    if (exceeded || power >= n) return k;
  }
}

double bucket_edge(std::size_t j, std::size_t k, double ref) {
  if (j >= k) return ref;
  return ref * static_cast<double>(j) / static_cast<double>(k);
}

std::size_t bucket_index(double value, std::size_t k, double ref) {
  if (value <= 0.0) return 0;
  if (value > ref) return k + 1;
  auto j = static_cast<std::size_t>(std::ceil(value * static_cast<double>(k) / ref));
  j = std::clamp<std::size_t>(j, 1, k);
  while (j > 1 && value <= bucket_edge(j - 1, k, ref)) --j;
  while (j < k && value > bucket_edge(j, k, ref)) ++j;
  return j;
}

BucketProfile bucket_profile(const std::vector<double>& values, std::size_t k, double ref) {
  BucketProfile profile;
  profile.k = k;
  profile.reference = ref;
  profile.count.assign(k + 2, 0);
  for (double v : values) ++profile.count[bucket_index(v, k, ref)];
  profile.at_least.assign(k + 3, 0);
  for (std::size_t j = k + 2; j-- > 0;) {
    profile.at_least[j] = profile.at_least[j + 1] + profile.count[j];
  }
  return profile;
}

std::size_t warmup_j_star(const std::vector<double>& values) {
  if (values.empty()) throw ValidationError("full information needs the value multiset");
  double top = *std::max_element(values.begin(), values.end());
  std::size_t k = random_order_k(values.size());
  auto profile = bucket_profile(values, k, top);
  for (std::size_t j = 1; j + 1 <= k; ++j) {
    if (profile.n_j(j) < profile.n_ge(j + 1)) return j;
  }
  throw ContractViolation("no bucket j* with n_j < n_{>=j+1}");
}

// --- full information warmup -------------------------------------------------

double WarmupFullInfo::choose_threshold(const PublicContext& context) {
  const auto& values = full_info(context).values;
  if (values.size() != context.n) throw ConfigError("full-information payload has the wrong size");
  double top = *std::max_element(values.begin(), values.end());
  accept_all_ = top <= 0.0;
  if (accept_all_) return 0.0;
  j_star_ = warmup_j_star(values);
  return bucket_edge(*j_star_ - 1, random_order_k(values.size()), top);
}

Action WarmupFullInfo::on_step_begin(std::size_t index) {
  if (accept_all_) return Action::accept();
  return ThresholdStrategy::on_step_begin(index);
}

// --- optimum information / hint ----------------------------------------------

RandomBucketThreshold::RandomBucketThreshold(InfoRegime regime, Rng rng)
    : ThresholdStrategy(regime), rng_(rng) {
  if (regime != InfoRegime::optimum && regime != InfoRegime::hint) {
    throw ContractViolation("random bucket threshold reads an optimum or a hint");
  }
}

double RandomBucketThreshold::choose_threshold(const PublicContext& context) {
  double ref = regime() == InfoRegime::optimum ? optimum_info(context).max : hint_info(context).hint;
  if (!(ref >= 0.0) || std::isinf(ref)) throw ValidationError("reference value must be finite and >= 0");
  std::size_t k = random_order_k(context.n);
  j_ = 1 + static_cast<std::size_t>(rng_.below(k - 1));
  return bucket_edge(*j_ - 1, k, ref);
}

StrategyPtr optimum_info_random_order(Rng rng) {
  return std::make_unique<RandomBucketThreshold>(InfoRegime::optimum, rng);
}

StrategyPtr hinted_random_order(Rng rng) {
  return std::make_unique<RandomBucketThreshold>(InfoRegime::hint, rng);
}

// --- no information ------------------------------------------------------------

NoInfoRandomOrder::NoInfoRandomOrder(Rng rng) : rng_(rng) {}

void NoInfoRandomOrder::begin(const PublicContext& context) {
  n_ = context.n;
  m_ = n_ / 2;
  observed_max_ = 0.0;
  hint_.reset();
  inner_.reset();
  hinted_branch_ = rng_.coin();
}

Action NoInfoRandomOrder::on_step_begin(std::size_t index) {
  if (n_ == 1) return Action::accept();
  if (index <= m_) return Action::observe();
  if (!inner_) {
    hint_ = observed_max_;
    PublicContext rest{n_ - m_, HintInfo{*hint_}};
    if (hinted_branch_) inner_ = hinted_random_order(rng_.split(1));
    else inner_ = single_threshold_strategy(*hint_, InfoRegime::hint);
    inner_->begin(rest);
  }
  return inner_->on_step_begin(index - m_);
}

Action NoInfoRandomOrder::on_outcome(const StepOutcome& outcome) {
  if (!inner_) {
    observed_max_ = std::max(observed_max_, outcome.observed());
    return Action::reject();
  }
  return inner_->on_outcome(outcome);
}

// --- arbitrary order with a hint ----------------------------------------------

ArbitraryOrderHinted::ArbitraryOrderHinted(Rng rng, std::optional<std::size_t> forced_j)
    : rng_(rng), forced_j_(forced_j) {}

void ArbitraryOrderHinted::begin(const PublicContext& context) {
  double hint = hint_info(context).hint;
  if (!(hint >= 0.0) || std::isinf(hint)) throw ValidationError("hint must be finite and >= 0");
  k_ = arbitrary_order_k(context.n);
  if (forced_j_) {
    if (*forced_j_ < 1 || *forced_j_ >= k_) throw ValidationError("forced j* must lie in 1..k-1");
    j_star_ = *forced_j_;
  } else {
    j_star_ = 1 + static_cast<std::size_t>(rng_.below(k_ - 1));
  }
  theta_ = bucket_edge(j_star_ - 1, k_, hint);
  follow_up_ = bucket_edge(j_star_ + 1, k_, hint);
  sampler_ = BitSampler();
  bits_.clear();
}

Action ArbitraryOrderHinted::on_step_begin(std::size_t) {
  phase_ = Phase::first_test;
  return Action::test(theta_);
}

Action ArbitraryOrderHinted::on_outcome(const StepOutcome& outcome) {
  if (phase_ == Phase::first_test) {
    if (outcome.failed()) return Action::reject();
    if (sampler_.decide(rng_)) return Action::accept();
    phase_ = Phase::follow_up;
    return Action::test_to(follow_up_);
  }
  std::uint8_t bit = outcome.passed() ? 1 : 0;
  sampler_.observe(bit);
  bits_.push_back(bit);
  return Action::reject();
}

// --- gap algorithm ---------------------------------------------------------------

void GapAlgorithm::begin(const PublicContext& context) {
  const auto& values = full_info(context).values;
  if (values.size() != context.n) throw ConfigError("full-information payload has the wrong size");
  k_ = gap_k(context.n);
  reference_ = *std::max_element(values.begin(), values.end());
  unseen_.assign(k_ + 1, 0);
  for (double v : values) ++unseen_[bucket_index(v, k_, reference_)];
  armed_.reset();
  armed_bucket_.reset();
  armed_step_.reset();
}

void GapAlgorithm::try_arm(std::size_t index) {
  // Scan upward for the first qualifying bucket.
  std::vector<std::size_t> suffix(k_ + 2, 0);
  for (std::size_t j = k_ + 1; j-- > 0;) suffix[j] = suffix[j + 1] + unseen_[j];
  for (std::size_t j = 1; j + 1 <= k_; ++j) {
    if (unseen_[j] == 0 && suffix[j + 1] > 0) {
      armed_ = bucket_edge(j - 1, k_, reference_);
      armed_bucket_ = j;
      armed_step_ = index;
      return;
    }
  }
}

Action GapAlgorithm::on_step_begin(std::size_t index) {
  if (!armed_ && reference_ > 0.0) try_arm(index);
  if (armed_) return Action::test(*armed_);
  return Action::observe();
}

Action GapAlgorithm::on_outcome(const StepOutcome& outcome) {
  if (armed_) return outcome.passed() ? Action::accept() : Action::reject();
  std::size_t bucket = bucket_index(outcome.observed(), k_, reference_);
  if (bucket > k_ || unseen_[bucket] == 0) {
    throw ContractViolation("observed value is not in the announced multiset");
  }
  --unseen_[bucket];
  return Action::reject();
}

StrategyPtr warmup_full_info() { return std::make_unique<WarmupFullInfo>(); }
StrategyPtr no_info_random_order(Rng rng) { return std::make_unique<NoInfoRandomOrder>(rng); }
StrategyPtr arbitrary_order_hinted(Rng rng, std::optional<std::size_t> forced_j) {
  return std::make_unique<ArbitraryOrderHinted>(rng, forced_j);
}
StrategyPtr gap_algorithm() { return std::make_unique<GapAlgorithm>(); }
StrategyPtr baseline_uniform(Rng rng) { return std::make_unique<BaselineUniform>(rng); }

}  // namespace penbench
