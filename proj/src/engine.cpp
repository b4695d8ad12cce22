#include "penbench/engine.hpp"

#include <algorithm>
#include <cmath>

#include "penbench/errors.hpp"

namespace penbench {

Threshold::Threshold(double value) : value_(value) {
  if (std::isnan(value) || value < 0.0) {
    throw ValidationError("threshold must be in [0, +inf], got " + std::to_string(value));
  }
}

double StepOutcome::observed() const {
  if (kind_ != Kind::fail) throw ContractViolation("a passing test carries no value");
  return observed_;
}

std::string to_string(const Action& action) {
  switch (action.kind) {
    case Action::Kind::test:
      return "test(" + std::to_string(action.amount) + ")";
    case Action::Kind::test_to:
      return "test_to(" + std::to_string(action.amount) + ")";
    case Action::Kind::accept:
      return "accept";
    case Action::Kind::reject:
      return "reject";
  }
  return "?";
}

std::string to_string(InfoRegime regime) {
  switch (regime) {
    case InfoRegime::none: return "none";
    case InfoRegime::full: return "full";
    case InfoRegime::optimum: return "optimum";
    case InfoRegime::hint: return "hint";
    case InfoRegime::distributions: return "distributions";
    case InfoRegime::samples: return "samples";
  }
  return "?";
}

InfoRegime regime_of(const InfoPayload& payload) {
  struct Visitor {
    InfoRegime operator()(const NoInfo&) const { return InfoRegime::none; }
    InfoRegime operator()(const FullInfo&) const { return InfoRegime::full; }
    InfoRegime operator()(const OptimumInfo&) const { return InfoRegime::optimum; }
    InfoRegime operator()(const HintInfo&) const { return InfoRegime::hint; }
    InfoRegime operator()(const DistributionInfo&) const { return InfoRegime::distributions; }
    InfoRegime operator()(const SampleInfo&) const { return InfoRegime::samples; }
  };
  return std::visit(Visitor{}, payload);
}

double VectorSource::next() {
  if (position_ >= values_.size()) throw ContractViolation("value source exhausted");
  return values_[position_++];
}

// ---------------------------------------------------------------------------

Game::Game(ValueSource& source, std::size_t n, bool record_transcript, std::size_t test_cap)
    : source_(source), n_(n), record_(record_transcript), test_cap_(test_cap) {
  if (n == 0) throw ValidationError("a game needs at least one option");
  open_step();
}

void Game::open_step() {
  ++index_;
  value_ = source_.next();
  if (std::isnan(value_) || value_ < 0.0) {
    throw ValidationError("option values must be nonnegative");
  }
  spent_ = 0.0;
  exhausted_ = false;
  tests_ = 0;
  current_ = StepRecord{};
  current_.index = index_;
  result_.steps_played = index_;
}

void Game::require_open(const char* what) const {
  if (over_) throw ContractViolation(std::string(what) + " after the game ended");
}

StepOutcome Game::apply_spend(double new_spent, double recorded_increment) {
  if (++tests_ > test_cap_) {
    throw ContractViolation("more than " + std::to_string(test_cap_) + " tests in one step");
  }
  StepOutcome outcome = StepOutcome::pass();
  if (exhausted_) {
    outcome = StepOutcome::fail(value_);
  } else {
    spent_ = new_spent;
    if (value_ <= spent_) {
      exhausted_ = true;
      outcome = StepOutcome::fail(value_);
    }
  }
  if (record_) {
    current_.thresholds.push_back(recorded_increment);
    current_.outcomes.push_back(outcome);
  }
  return outcome;
}

StepOutcome Game::test(const Threshold& increment) {
  require_open("test");
  return apply_spend(spent_ + increment.value(), increment.value());
}

StepOutcome Game::test_to(const Threshold& cumulative) {
  require_open("test");
  if (cumulative.value() < spent_ && !exhausted_) {
    throw ValidationError("cumulative threshold may not decrease within a step");
  }
  double target = exhausted_ ? spent_ : cumulative.value();
  return apply_spend(target, target - spent_);
}

void Game::accept() {
  require_open("accept");
  double score = exhausted_ ? 0.0 : std::max(value_ - spent_, 0.0);
  result_.score = score;
  result_.accepted_index = index_;
  result_.accepted_spent = spent_;
  result_.accepted_value = value_;
  if (record_) {
    current_.decision = StepRecord::Decision::accept;
    current_.cumulative_spent = spent_;
    result_.transcript.push_back(std::move(current_));
  }
  over_ = true;
}

void Game::reject() {
  require_open("reject");
  if (record_) {
    current_.decision = StepRecord::Decision::reject;
    current_.cumulative_spent = spent_;
    result_.transcript.push_back(std::move(current_));
  }
  if (index_ == n_) {
    over_ = true;
    return;
  }
  open_step();
}

const GameResult& Game::result() const {
  if (!over_) throw ContractViolation("result requested before the game ended");
  return result_;
}

GameResult Game::take_result() {
  if (!over_) throw ContractViolation("result requested before the game ended");
  return std::move(result_);
}

// ---------------------------------------------------------------------------

GameResult play(ValueSource& source, Strategy& strategy, const PublicContext& context,
                const PlayOptions& options) {
  if (strategy.regime() != regime_of(context.info)) {
    throw ConfigError("strategy needs '" + to_string(strategy.regime()) +
                      "' information but the game provides '" +
                      to_string(regime_of(context.info)) + "'");
  }
  Game game(source, context.n, options.record_transcript, options.test_cap);
  strategy.begin(context);
  while (!game.over()) {
    Action action = strategy.on_step_begin(game.step_index());
    bool step_done = false;
    while (!step_done) {
      switch (action.kind) {
        case Action::Kind::test:
          action = strategy.on_outcome(game.test(Threshold(action.amount)));
          break;
        case Action::Kind::test_to:
          action = strategy.on_outcome(game.test_to(Threshold(action.amount)));
          break;
        case Action::Kind::accept:
          game.accept();
          step_done = true;
          break;
        case Action::Kind::reject:
          game.reject();
          step_done = true;
          break;
      }
    }
  }
  GameResult result = game.take_result();
  if (result.accepted_index) {
    double expected = std::max(result.accepted_value - result.accepted_spent, 0.0);
    if (result.score != expected) throw ContractViolation("score identity violated");
  } else if (result.score != 0.0) {
    throw ContractViolation("score without acceptance");
  }
  return result;
}

GameResult play(const Instance& instance, Strategy& strategy, const PublicContext& context,
                Rng& rng, const PlayOptions& options) {
  if (context.n != instance.size()) {
    throw ConfigError("context size does not match the instance");
  }
  if (instance.order == OrderModel::uniform_random) {
    std::vector<double> arrived = instance.values;
    rng.shuffle(arrived.begin(), arrived.end());
    VectorSource source(arrived);
    return play(source, strategy, context, options);
  }
  VectorSource source(instance.values);
  return play(source, strategy, context, options);
}

double score_from_transcript(const GameResult& result, const std::vector<double>& arrived_values) {
  if (!result.accepted_index) return 0.0;
  const StepRecord* accepted = nullptr;
  for (const auto& step : result.transcript) {
    if (step.decision == StepRecord::Decision::accept) accepted = &step;
  }
  if (accepted == nullptr) throw ContractViolation("transcript has no accepted step");
  double increments = 0.0;
  for (std::size_t t = 0; t < accepted->thresholds.size(); ++t) {
    if (accepted->outcomes[t].failed()) return 0.0;
    increments += accepted->thresholds[t];
  }
  double spent = accepted->cumulative_spent;
  if (std::abs(increments - spent) > 1e-12 * std::max(1.0, spent)) {
    throw ContractViolation("transcript increments do not add up to the recorded spend");
  }
  double value = arrived_values.at(accepted->index - 1);
  return std::max(value - spent, 0.0);
}

}  // namespace penbench
