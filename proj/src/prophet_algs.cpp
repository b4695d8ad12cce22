#include "penbench/prophet_algs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "penbench/errors.hpp"

namespace penbench {

namespace {

std::size_t ceil_log2(std::size_t n) {
  if (n <= 1) return 0;
  return static_cast<std::size_t>(std::bit_width(n - 1));
}

const DistributionPtr& iid_law(const PublicContext& context) {
  const auto& laws = distribution_info(context).laws;
  if (laws.empty() || !laws.front()) throw ConfigError("distribution payload is empty");
  return laws.front();
}

std::size_t draw_weighted(Rng& rng, const std::vector<double>& weights) {
  double u = rng.uniform();
  double running = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    running += weights[j];
    if (u < running) return j;
  }
  return weights.size() - 1;
}

}  // namespace

DistributionPtr quantile_law(const DistributionPtr& law, const ProphetOptions& options) {
  if (!options.smooth) return law;
  return smooth_if_discrete(law, options.epsilon);
}

QuantileGrid quantile_grid(const Distribution& law, std::size_t n) {
  if (n == 0) throw ValidationError("quantile grid needs n >= 1");
  QuantileGrid grid;
  grid.k = std::max<std::size_t>(1, ceil_log2(n));
  for (std::size_t j = 0; j < grid.k; ++j) {
    double alpha = std::ldexp(1.0, -static_cast<int>(j));
    grid.alphas.push_back(alpha);
    grid.taus.push_back(law.upper_quantile(alpha));
  }
  return grid;
}

RefinedPlan refined_plan(std::size_t n) {
  if (n < 3) throw ValidationError("the refined i.i.d. algorithm needs n >= 3");
  RefinedPlan plan;
  double nn = static_cast<double>(n);
  plan.x = std::sqrt(std::log(nn)) / nn;
  plan.k = static_cast<std::size_t>(std::ceil(std::log(1.0 / plan.x)));
  double kk = static_cast<double>(plan.k);
  for (std::size_t j = 0; j <= plan.k; ++j) {
    plan.alphas.push_back(j == 0 ? 1.0 : std::pow(plan.x, static_cast<double>(j) / kk));
  }
  double alpha_k = plan.alphas.back();
  double hit = -std::expm1(nn * std::log1p(-alpha_k));  // 1 - (1 - alpha_k)^n
  for (std::size_t j = 0; j < plan.k; ++j) plan.c.push_back(hit * plan.alphas[j + 1] / plan.alphas[j]);
  plan.c.push_back(hit / (nn * alpha_k));
  double gamma = 0.0;
  for (double c : plan.c) gamma += 1.0 / c;
  for (double c : plan.c) plan.weights.push_back((1.0 / c) / gamma);
  return plan;
}

double IidFirst::choose_threshold(const PublicContext& context) {
  auto law = quantile_law(iid_law(context), options_);
  return law->upper_quantile(1.0 / static_cast<double>(context.n));
}

double IidSecond::choose_threshold(const PublicContext& context) {
  auto law = quantile_law(iid_law(context), options_);
  std::size_t k = std::max<std::size_t>(1, ceil_log2(context.n));
  alpha_ = std::ldexp(1.0, -static_cast<int>(rng_.below(k)));
  return law->upper_quantile(*alpha_);
}

double IidRefined::choose_threshold(const PublicContext& context) {
  auto law = quantile_law(iid_law(context), options_);
  auto plan = refined_plan(context.n);
  alpha_ = plan.alphas[draw_weighted(rng_, plan.weights)];
  return law->upper_quantile(*alpha_);
}

StrategyPtr iid_first_algorithm(ProphetOptions options) { return std::make_unique<IidFirst>(options); }

StrategyPtr iid_second_algorithm(Rng rng, ProphetOptions options) {
  return std::make_unique<IidSecond>(rng, options);
}

StrategyPtr iid_mixture(Rng rng, ProphetOptions options) {
  Rng coin = rng.split(0);
  return std::make_unique<Mixture>(iid_first_algorithm(options),
                                   iid_second_algorithm(rng.split(1), options), coin);
}

StrategyPtr iid_refined(Rng rng, ProphetOptions options) {
  return std::make_unique<IidRefined>(rng, options);
}

// --- general prophet -------------------------------------------------------------

TailGroupProfile tail_group_profile(const std::vector<DistributionPtr>& laws, double sum_tolerance) {
  if (laws.empty()) throw ValidationError("general prophet needs at least one law");
  TailGroupProfile profile;
  std::size_t n = laws.size();
  profile.tau_half = max_law_upper_quantile(laws, 0.5);
  double sum = 0.0;
  for (const auto& law : laws) {
    profile.alphas.push_back(law->survival(profile.tau_half));
    sum += profile.alphas.back();
  }
  if (sum < 0.5 - sum_tolerance) {
    throw ContractViolation("tail masses at tau_1/2 sum to " + std::to_string(sum) + " < 1/2");
  }
  profile.k = ceil_log2(n);
  std::size_t k = profile.k;
  profile.groups.assign(k + 3, {});
  for (std::size_t i = 0; i < n; ++i) {
    double a = profile.alphas[i];
    std::size_t group = k + 2;
    for (std::size_t j = 0; j <= k + 1; ++j) {
      if (a > std::ldexp(1.0, -static_cast<int>(j + 1)) && a <= std::ldexp(1.0, -static_cast<int>(j))) {
        group = j;
        break;
      }
    }
    profile.groups[group].push_back(i + 1);
  }
  double best = -1.0;
  for (std::size_t j = 0; j <= k + 1; ++j) {
    double score = std::ldexp(static_cast<double>(profile.groups[j].size()), -static_cast<int>(j));
    if (score > best) {
      best = score;
      profile.j_star = j;
    }
  }
  double floor = (0.25 - sum_tolerance) / static_cast<double>(k + 2);
  if (best < floor) throw ContractViolation("no tail group reaches |G_j|/2^j >= 1/(4(k+2))");
  double size = static_cast<double>(profile.groups[profile.j_star].size());
  for (std::size_t j = 0; j <= profile.j_star; ++j) {
    double w = 1.0 / std::min(std::ldexp(size, -static_cast<int>(j)), 1.0);
    profile.weights.push_back(w);
    profile.z += w;
  }
  for (double& w : profile.weights) w /= profile.z;
  return profile;
}

std::vector<std::vector<std::size_t>> block_partition(const std::vector<std::size_t>& members,
                                                      std::size_t block_size) {
  if (block_size == 0) throw ValidationError("block size must be positive");
  std::vector<std::vector<std::size_t>> blocks;
  for (std::size_t start = 0; start < members.size(); start += block_size) {
    auto end = std::min(members.size(), start + block_size);
    blocks.emplace_back(members.begin() + static_cast<std::ptrdiff_t>(start),
                        members.begin() + static_cast<std::ptrdiff_t>(end));
  }
  return blocks;
}

std::shared_ptr<const GeneralProphetPlan> general_prophet_plan(const std::vector<DistributionPtr>& laws,
                                                               const ProphetOptions& options) {
  auto plan = std::make_shared<GeneralProphetPlan>();
  for (const auto& law : laws) plan->quantile_laws.push_back(quantile_law(law, options));
  plan->profile = tail_group_profile(plan->quantile_laws);
  return plan;
}

GeneralProphet::GeneralProphet(Rng rng, ProphetOptions options,
                               std::shared_ptr<const GeneralProphetPlan> plan)
    : rng_(rng), options_(options), plan_(std::move(plan)) {}

void GeneralProphet::begin(const PublicContext& context) {
  const auto& laws = distribution_info(context).laws;
  if (!plan_) plan_ = general_prophet_plan(laws, options_);
  if (plan_->quantile_laws.size() != context.n) throw ConfigError("plan does not match the game size");
  block_branch_ = rng_.coin();
  block_.clear();
  alpha_ = 1.0;
  if (!block_branch_) return;
  const auto& profile = plan_->profile;
  std::size_t j = draw_weighted(rng_, profile.weights);
  alpha_ = std::ldexp(1.0, -static_cast<int>(j));
  auto blocks = block_partition(profile.groups[profile.j_star], std::size_t{1} << j);
  if (!blocks.empty()) block_ = blocks[rng_.below(blocks.size())];
}

Action GeneralProphet::on_step_begin(std::size_t index) {
  if (!block_branch_) return Action::test(plan_->profile.tau_half);
  if (!std::binary_search(block_.begin(), block_.end(), index)) return Action::reject();
  return Action::test(plan_->quantile_laws[index - 1]->upper_quantile(alpha_));
}

Action GeneralProphet::on_outcome(const StepOutcome& outcome) {
  return outcome.passed() ? Action::accept() : Action::reject();
}

StrategyPtr general_prophet(Rng rng, ProphetOptions options,
                            std::shared_ptr<const GeneralProphetPlan> plan) {
  return std::make_unique<GeneralProphet>(rng, options, std::move(plan));
}

// --- single sample -------------------------------------------------------------

void SingleSampleProphet::begin(const PublicContext& context) {
  const auto& samples = sample_info(context).samples;
  if (samples.empty()) throw ValidationError("single-sample prophet needs at least one sample");
  hint_ = *std::max_element(samples.begin(), samples.end());
  hinted_branch_ = rng_.coin();
  PublicContext inner_context{context.n, HintInfo{hint_}};
  if (hinted_branch_) inner_ = arbitrary_order_hinted(rng_.split(1));
  else inner_ = single_threshold_strategy(hint_, InfoRegime::hint);
  inner_->begin(inner_context);
}

StrategyPtr single_sample_prophet(Rng rng) { return std::make_unique<SingleSampleProphet>(rng); }

}  // namespace penbench
