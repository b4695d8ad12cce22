#include "penbench/strategy_specs.hpp"

#include <charconv>
#include <cmath>
#include <memory>
#include <mutex>

#include "penbench/errors.hpp"

namespace penbench {

namespace {

double parse_parameter(std::string_view spec, std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !(value >= 0.0) || std::isinf(value)) {
    throw ConfigError("strategy '" + std::string(spec) + "' needs a finite number >= 0 after ':'", 0,
                      spec.size() - text.size() + 1);
  }
  return value;
}

// Computes the general algorithm's plan on first use and shares it.
struct PlanCache {
  std::once_flag once;
  std::shared_ptr<const GeneralProphetPlan> plan;
};

}  // namespace

std::vector<std::string> known_strategies() {
  return {"iid-first", "iid-second", "iid-mix",   "iid-refined", "general",
          "single-sample", "threshold:<x>", "sec-full", "sec-opt", "sec-hint[:<x>]",
          "sec-noinfo", "sec-arb[:<x>]", "sec-gap", "baseline-uniform"};
}

StrategyBinding parse_strategy(std::string_view spec, ProphetOptions options) {
  StrategyBinding b;
  b.spec = std::string(spec);
  auto colon = spec.find(':');
  std::string_view name = spec.substr(0, colon);
  std::optional<double> param;
  if (colon != std::string_view::npos) param = parse_parameter(spec, spec.substr(colon + 1));

  auto no_param = [&] {
    if (param) throw ConfigError("strategy '" + std::string(name) + "' takes no parameter", 0, colon + 1);
  };

  if (name == "threshold") {
    if (!param) throw ConfigError("threshold strategy needs a value, e.g. threshold:2", 0, 1);
    double theta = *param;
    b.regime = InfoRegime::none;
    b.make = [theta](Rng, const PublicContext&) { return single_threshold_strategy(theta); };
  } else if (name == "iid-first") {
    no_param();
    b.regime = InfoRegime::distributions;
    b.needs_iid = true;
    b.make = [options](Rng, const PublicContext&) { return iid_first_algorithm(options); };
  } else if (name == "iid-second") {
    no_param();
    b.regime = InfoRegime::distributions;
    b.needs_iid = true;
    b.make = [options](Rng rng, const PublicContext&) { return iid_second_algorithm(rng, options); };
  } else if (name == "iid-mix") {
    no_param();
    b.regime = InfoRegime::distributions;
    b.needs_iid = true;
    b.make = [options](Rng rng, const PublicContext&) { return iid_mixture(rng, options); };
  } else if (name == "iid-refined") {
    no_param();
    b.regime = InfoRegime::distributions;
    b.needs_iid = true;
    b.make = [options](Rng rng, const PublicContext&) { return iid_refined(rng, options); };
  } else if (name == "general") {
    no_param();
    b.regime = InfoRegime::distributions;
    auto cache = std::make_shared<PlanCache>();
    b.make = [options, cache](Rng rng, const PublicContext& context) {
      std::call_once(cache->once, [&] {
        cache->plan = general_prophet_plan(distribution_info(context).laws, options);
      });
      return general_prophet(rng, options, cache->plan);
    };
  } else if (name == "single-sample") {
    no_param();
    b.regime = InfoRegime::samples;
    b.make = [](Rng rng, const PublicContext&) { return single_sample_prophet(rng); };
  } else if (name == "sec-full") {
    no_param();
    b.regime = InfoRegime::full;
    b.make = [](Rng, const PublicContext&) { return warmup_full_info(); };
  } else if (name == "sec-opt") {
    no_param();
    b.regime = InfoRegime::optimum;
    b.make = [](Rng rng, const PublicContext&) { return optimum_info_random_order(rng); };
  } else if (name == "sec-hint") {
    b.regime = InfoRegime::hint;
    b.hint = param;
    b.make = [](Rng rng, const PublicContext&) { return hinted_random_order(rng); };
  } else if (name == "sec-noinfo") {
    no_param();
    b.regime = InfoRegime::none;
    b.make = [](Rng rng, const PublicContext&) { return no_info_random_order(rng); };
  } else if (name == "sec-arb") {
    b.regime = InfoRegime::hint;
    b.hint = param;
    b.make = [](Rng rng, const PublicContext&) { return arbitrary_order_hinted(rng); };
  } else if (name == "sec-gap") {
    no_param();
    b.regime = InfoRegime::full;
    b.make = [](Rng, const PublicContext&) { return gap_algorithm(); };
  } else if (name == "baseline-uniform") {
    no_param();
    b.regime = InfoRegime::none;
    b.make = [](Rng rng, const PublicContext&) { return baseline_uniform(rng); };
  } else {
    std::string list;
    for (const auto& s : known_strategies()) list += (list.empty() ? "" : ", ") + s;
    throw ConfigError("unknown strategy '" + std::string(spec) + "' (known: " + list + ")", 0, 1);
  }
  return b;
}

}  // namespace penbench
