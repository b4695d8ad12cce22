#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "penbench/prophet_algs.hpp"
#include "penbench/strategy_common.hpp"

namespace penbench {

/// A parsed strategy specification string, able to build a fresh strategy
/// for every game.
struct StrategyBinding {
  std::string spec;
  InfoRegime regime = InfoRegime::none;
  /// Explicit hint from `sec-hint:<x>` / `sec-arb:<x>`; a bare spec uses a_[1].
  std::optional<double> hint;
  /// Builds the strategy for one game. The context is the one the game will
  /// be played with (the general algorithm derives its plan from it once).
  std::function<StrategyPtr(Rng rng, const PublicContext& context)> make;
  /// i.i.d. strategies read a single law and refuse non-identical laws.
  bool needs_iid = false;
};

/// Recognized specs:
///   prophet:   iid-first, iid-second, iid-mix, iid-refined, general, single-sample, threshold:<x>
///   secretary: sec-full, sec-opt, sec-hint[:<x>], sec-noinfo, sec-arb[:<x>], sec-gap, baseline-uniform
/// Throws ConfigError on an unknown name or malformed parameter.
StrategyBinding parse_strategy(std::string_view spec, ProphetOptions options = {});

std::vector<std::string> known_strategies();

}  // namespace penbench
