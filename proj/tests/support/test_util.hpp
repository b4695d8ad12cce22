#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "penbench/engine.hpp"
#include "penbench/strategy_common.hpp"

namespace test_util {

struct Stats {
  double mean = 0.0;
  double se = 0.0;
};

inline Stats stats_of(const std::vector<double>& xs) {
  Stats s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / double(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  if (xs.size() > 1) s.se = std::sqrt(sq / double(xs.size() - 1) / double(xs.size()));
  return s;
}

/// Plays `values` in the given order and returns the result.
inline penbench::GameResult play_values(const std::vector<double>& values, penbench::Strategy& strategy,
                                        const penbench::PublicContext& context) {
  penbench::VectorSource source(values);
  return penbench::play(source, strategy, context);
}

inline penbench::PublicContext no_info(std::size_t n) { return {n, penbench::NoInfo{}}; }

inline penbench::PublicContext full_info(std::vector<double> values) {
  std::size_t n = values.size();
  std::sort(values.begin(), values.end());
  return {n, penbench::FullInfo{std::move(values)}};
}

/// Records every action a strategy issues, in order.
class Recorder final : public penbench::Strategy {
 public:
  explicit Recorder(penbench::Strategy& inner) : inner_(inner) {}
  penbench::InfoRegime regime() const override { return inner_.regime(); }
  void begin(const penbench::PublicContext& context) override { inner_.begin(context); }
  penbench::Action on_step_begin(std::size_t index) override { return log(inner_.on_step_begin(index)); }
  penbench::Action on_outcome(const penbench::StepOutcome& outcome) override {
    return log(inner_.on_outcome(outcome));
  }
  const std::vector<penbench::Action>& actions() const { return actions_; }

 private:
  penbench::Action log(penbench::Action a) {
    actions_.push_back(a);
    return a;
  }
  penbench::Strategy& inner_;
  std::vector<penbench::Action> actions_;
};

}  // namespace test_util
