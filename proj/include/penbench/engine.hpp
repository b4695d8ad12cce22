#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "penbench/instance.hpp"
#include "penbench/rng.hpp"

namespace penbench {

class Distribution;

/// Test threshold in [0, +inf]. Construction rejects negative or NaN values.
class Threshold {
 public:
  explicit Threshold(double value);
  static Threshold infinite() { return Threshold(std::numeric_limits<double>::infinity()); }
  static Threshold zero() { return Threshold(0.0); }

  double value() const { return value_; }
  bool is_infinite() const { return value_ == std::numeric_limits<double>::infinity(); }

 private:
  double value_;
};

/// What a test reveals: one bit on pass, the exact value on fail.
class StepOutcome {
 public:
  enum class Kind { pass, fail };

  static StepOutcome pass() { return StepOutcome(Kind::pass, 0.0); }
  static StepOutcome fail(double observed) { return StepOutcome(Kind::fail, observed); }

  Kind kind() const { return kind_; }
  bool passed() const { return kind_ == Kind::pass; }
  bool failed() const { return kind_ == Kind::fail; }
  /// Only meaningful for a fail outcome.
  double observed() const;

 private:
  StepOutcome(Kind kind, double observed) : kind_(kind), observed_(observed) {}
  Kind kind_;
  double observed_;
};

/// A strategy's move. `test` adds an increment to this step's cumulative
/// spend; `test_to` raises the cumulative spend to an absolute level.
struct Action {
  enum class Kind { test, test_to, accept, reject };

  Kind kind = Kind::reject;
  double amount = 0.0;

  static Action test(double increment) { return {Kind::test, increment}; }
  static Action test_to(double cumulative) { return {Kind::test_to, cumulative}; }
  static Action observe() { return test(std::numeric_limits<double>::infinity()); }
  static Action accept() { return {Kind::accept, 0.0}; }
  static Action reject() { return {Kind::reject, 0.0}; }

  bool operator==(const Action&) const = default;
};

std::string to_string(const Action& action);

// ---------------------------------------------------------------------------
// Information regimes. The payload is fixed at game start.

enum class InfoRegime { none, full, optimum, hint, distributions, samples };

std::string to_string(InfoRegime regime);

struct NoInfo {};
struct FullInfo {
  std::vector<double> values;  // the multiset, sorted ascending
};
struct OptimumInfo {
  double max = 0.0;
};
struct HintInfo {
  double hint = 0.0;
};
struct DistributionInfo {
  std::vector<std::shared_ptr<const Distribution>> laws;  // one per option, in arrival order
};
struct SampleInfo {
  std::vector<double> samples;  // one independent sample per option
};

using InfoPayload =
    std::variant<NoInfo, FullInfo, OptimumInfo, HintInfo, DistributionInfo, SampleInfo>;

InfoRegime regime_of(const InfoPayload& payload);

struct PublicContext {
  std::size_t n = 0;
  InfoPayload info = NoInfo{};
};

/// The player. Receives only test outcomes; never sees X_i otherwise.
/// Instances hold per-game state and are created fresh for every game, each
/// with its own random source.
class Strategy {
 public:
  virtual ~Strategy() = default;

  /// Information regime this strategy consumes.
  virtual InfoRegime regime() const = 0;
  virtual void begin(const PublicContext& context) = 0;
  /// Called when step `index` (1-based) opens.
  virtual Action on_step_begin(std::size_t index) = 0;
  virtual Action on_outcome(const StepOutcome& outcome) = 0;
};

// ---------------------------------------------------------------------------
// Transcript and result

struct StepRecord {
  enum class Decision { accept, reject };

  std::size_t index = 0;
  std::vector<double> thresholds;  // increments as issued; +inf allowed
  std::vector<StepOutcome> outcomes;
  Decision decision = Decision::reject;
  double cumulative_spent = 0.0;
};

struct GameResult {
  double score = 0.0;
  std::optional<std::size_t> accepted_index;
  double accepted_spent = 0.0;   // cumulative threshold of the accepted option
  double accepted_value = 0.0;   // X_a; engine-side bookkeeping, not shown to the player
  std::size_t steps_played = 0;
  std::vector<StepRecord> transcript;  // empty unless recording was requested
};

/// Supplies X_1, X_2, ... on demand. Lets lazily generated instances be
/// played without materializing the whole sequence.
class ValueSource {
 public:
  virtual ~ValueSource() = default;
  virtual double next() = 0;
};

class VectorSource final : public ValueSource {
 public:
  explicit VectorSource(const std::vector<double>& values) : values_(values) {}
  double next() override;

 private:
  const std::vector<double>& values_;
  std::size_t position_ = 0;
};

inline constexpr std::size_t kDefaultTestCap = 64;

/// Step-by-step game state machine. Steps open automatically; `reject`
/// advances to the next step and `accept` ends the game. Any call after the
/// game is over throws ContractViolation.
class Game {
 public:
  Game(ValueSource& source, std::size_t n, bool record_transcript = false,
       std::size_t test_cap = kDefaultTestCap);

  bool over() const { return over_; }
  std::size_t n() const { return n_; }
  /// 1-based index of the open step.
  std::size_t step_index() const { return index_; }
  double cumulative_spent() const { return spent_; }
  bool exhausted() const { return exhausted_; }

  StepOutcome test(const Threshold& increment);
  StepOutcome test_to(const Threshold& cumulative);
  void accept();
  void reject();

  const GameResult& result() const;
  GameResult take_result();

 private:
  void open_step();
  void require_open(const char* what) const;
  StepOutcome apply_spend(double new_spent, double recorded_increment);

  ValueSource& source_;
  std::size_t n_;
  bool record_;
  std::size_t test_cap_;

  bool over_ = false;
  std::size_t index_ = 0;
  double value_ = 0.0;
  double spent_ = 0.0;
  bool exhausted_ = false;
  std::size_t tests_ = 0;
  StepRecord current_;
  GameResult result_;
};

struct PlayOptions {
  bool record_transcript = true;
  std::size_t test_cap = kDefaultTestCap;
};

/// Drives `strategy` through a game over the first `n` values of `source`.
/// Throws ConfigError if the strategy's regime does not match the payload.
GameResult play(ValueSource& source, Strategy& strategy, const PublicContext& context,
                const PlayOptions& options = {});

/// Plays against a materialized instance, applying its order model with `rng`.
GameResult play(const Instance& instance, Strategy& strategy, const PublicContext& context,
                Rng& rng, const PlayOptions& options = {});

/// max{X - spent, 0} recomputed from a transcript and the true values.
double score_from_transcript(const GameResult& result, const std::vector<double>& arrived_values);

}  // namespace penbench
