#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "penbench/distributions.hpp"
#include "penbench/secretary_algs.hpp"
#include "penbench/strategy_common.hpp"

namespace penbench {

/// Discrete laws are wrapped in the continuity reduction before any quantile
/// is taken unless `smooth` is false. epsilon <= 0 selects the default width.
struct ProphetOptions {
  bool smooth = true;
  double epsilon = 0.0;
};

DistributionPtr quantile_law(const DistributionPtr& law, const ProphetOptions& options);

struct QuantileGrid {
  std::size_t k = 0;           // max(1, ceil(log2 n))
  std::vector<double> alphas;  // 1, 1/2, ..., 2^{-(k-1)}
  std::vector<double> taus;    // matching upper quantiles
};

QuantileGrid quantile_grid(const Distribution& law, std::size_t n);

/// Thresholds tau_{alpha_j} of the refined i.i.d. algorithm with their mixture
/// probabilities.
struct RefinedPlan {
  double x = 0.0;               // sqrt(ln n) / n
  std::size_t k = 0;            // ceil(ln(1/x))
  std::vector<double> alphas;   // x^{j/k}, j = 0..k
  std::vector<double> c;        // C_j
  std::vector<double> weights;  // (1/C_j) / gamma
};

/// Requires n >= 3.
RefinedPlan refined_plan(std::size_t n);

/// Threshold tau_{1/n} of the single law in the payload.
class IidFirst final : public ThresholdStrategy {
 public:
  explicit IidFirst(ProphetOptions options = {})
      : ThresholdStrategy(InfoRegime::distributions), options_(options) {}

 protected:
  double choose_threshold(const PublicContext& context) override;

 private:
  ProphetOptions options_;
};

/// Threshold tau_alpha with alpha uniform on the quantile grid.
class IidSecond final : public ThresholdStrategy {
 public:
  IidSecond(Rng rng, ProphetOptions options = {})
      : ThresholdStrategy(InfoRegime::distributions), rng_(rng), options_(options) {}
  std::optional<double> alpha() const { return alpha_; }

 protected:
  double choose_threshold(const PublicContext& context) override;

 private:
  Rng rng_;
  ProphetOptions options_;
  std::optional<double> alpha_;
};

class IidRefined final : public ThresholdStrategy {
 public:
  IidRefined(Rng rng, ProphetOptions options = {})
      : ThresholdStrategy(InfoRegime::distributions), rng_(rng), options_(options) {}
  std::optional<double> alpha() const { return alpha_; }

 protected:
  double choose_threshold(const PublicContext& context) override;

 private:
  Rng rng_;
  ProphetOptions options_;
  std::optional<double> alpha_;
};

StrategyPtr iid_first_algorithm(ProphetOptions options = {});
StrategyPtr iid_second_algorithm(Rng rng, ProphetOptions options = {});
StrategyPtr iid_mixture(Rng rng, ProphetOptions options = {});
StrategyPtr iid_refined(Rng rng, ProphetOptions options = {});

/// Tail grouping of the general algorithm.
struct TailGroupProfile {
  double tau_half = 0.0;                   // upper 1/2-quantile of the max law
  std::vector<double> alphas;              // P(X_i > tau_half), per option
  std::size_t k = 0;                       // ceil(log2 n)
  std::vector<std::vector<std::size_t>> groups;  // G_0..G_{k+2}, 1-based option indices
  std::size_t j_star = 0;
  std::vector<double> weights;             // over alpha = 2^{-j}, j = 0..j_star
  double z = 0.0;
};

/// Checks that sum alpha_i >= 1/2 - tolerance and |G_{j*}|/2^{j*} >= 1/(4(k+2));
/// throws ContractViolation otherwise.
TailGroupProfile tail_group_profile(const std::vector<DistributionPtr>& quantile_laws,
                                    double sum_tolerance = 1e-6);

/// Chronological blocks of `members` (ascending) of size `block_size`; the
/// last block may be shorter.
std::vector<std::vector<std::size_t>> block_partition(const std::vector<std::size_t>& members,
                                                      std::size_t block_size);

/// Everything the general algorithm derives from the laws alone; shareable
/// across games over the same laws.
struct GeneralProphetPlan {
  std::vector<DistributionPtr> quantile_laws;
  TailGroupProfile profile;
};

std::shared_ptr<const GeneralProphetPlan> general_prophet_plan(
    const std::vector<DistributionPtr>& laws, const ProphetOptions& options = {});

/// Fair coin between the block algorithm on G_{j*} and a single threshold at
/// tau_{1/2}.
class GeneralProphet final : public Strategy {
 public:
  GeneralProphet(Rng rng, ProphetOptions options = {},
                 std::shared_ptr<const GeneralProphetPlan> plan = nullptr);

  InfoRegime regime() const override { return InfoRegime::distributions; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override;
  Action on_outcome(const StepOutcome& outcome) override;

  const GeneralProphetPlan& plan() const { return *plan_; }
  bool block_branch() const { return block_branch_; }
  double alpha() const { return alpha_; }
  const std::vector<std::size_t>& chosen_block() const { return block_; }

 private:
  Rng rng_;
  ProphetOptions options_;
  std::shared_ptr<const GeneralProphetPlan> plan_;
  bool block_branch_ = false;
  double alpha_ = 1.0;
  std::vector<std::size_t> block_;
};

StrategyPtr general_prophet(Rng rng, ProphetOptions options = {},
                            std::shared_ptr<const GeneralProphetPlan> plan = nullptr);

/// One sample per option: hint = max sample; fair coin between the
/// arbitrary-order hinted algorithm and a single threshold at the hint.
class SingleSampleProphet final : public Strategy {
 public:
  explicit SingleSampleProphet(Rng rng) : rng_(rng) {}

  InfoRegime regime() const override { return InfoRegime::samples; }
  void begin(const PublicContext& context) override;
  Action on_step_begin(std::size_t index) override { return inner_->on_step_begin(index); }
  Action on_outcome(const StepOutcome& outcome) override { return inner_->on_outcome(outcome); }

  double hint() const { return hint_; }
  bool hinted_branch() const { return hinted_branch_; }

 private:
  Rng rng_;
  double hint_ = 0.0;
  bool hinted_branch_ = false;
  StrategyPtr inner_;
};

StrategyPtr single_sample_prophet(Rng rng);

}  // namespace penbench
