#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "penbench/distributions.hpp"
#include "penbench/engine.hpp"
#include "penbench/prophet_algs.hpp"
#include "penbench/strategy_specs.hpp"

namespace penbench {

enum class InstanceFamily { prophet, secretary };

/// Per-trial random lanes: instance draw and arrival order, strategy coins,
/// and the samples handed to sample-based strategies.
inline constexpr std::uint64_t kInstanceLane = 0;
inline constexpr std::uint64_t kStrategyLane = 1;
inline constexpr std::uint64_t kSampleLane = 2;

struct TrialResult {
  double score = 0.0;
  double benchmark = 0.0;  // realized max (prophet) or a_[1] (secretary)
  bool accepted = false;
  GameResult game;               // transcript only when requested
  std::vector<double> arrived;   // arrival order, only when requested
};

/// A source of games: the values, their arrival order and the public payload
/// for each information regime.
class InstanceModel {
 public:
  virtual ~InstanceModel() = default;
  virtual InstanceFamily family() const = 0;
  virtual std::size_t n() const = 0;
  virtual std::string describe() const = 0;
  virtual std::string order_name() const = 0;
  /// Throws ConfigError if the strategy cannot be played on this model.
  virtual void check_compatible(const StrategyBinding& strategy) const;
  /// Plays trial `index` of an experiment seeded with `seed`.
  virtual TrialResult play_trial(const StrategyBinding& strategy, std::uint64_t seed,
                                 std::uint64_t index, const PlayOptions& options,
                                 bool keep_arrivals = false) const = 0;
  /// Materializes the instance of trial `index` in arrival order.
  virtual Instance sample_instance(std::uint64_t seed, std::uint64_t index) const = 0;
};

/// Instance specs (docs/instance_spec.md):
///   iid(<dist>, n) | indep(<dist>[*count], ...) | <dist> with n given separately
///   values(v1, v2, ...) | powers(k[, base]) | geomorder(k) | truncexp-sec(n) | file:<path>
/// `{n}` in the spec is replaced by `n`. `order` overrides the default order:
/// uniform, fixed, ascending, descending, alternating (secretary multisets only).
std::unique_ptr<InstanceModel> parse_instance(std::string_view spec, std::optional<std::size_t> n = {},
                                              std::optional<std::string> order = {});

/// Replaces every `{n}` in `text`.
std::string substitute_n(std::string_view text, std::size_t n);

struct ExperimentConfig {
  std::string strategy;
  std::string instance;
  std::optional<std::size_t> n;
  std::optional<std::string> order;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string out;             // empty: standard output
  std::string format = "json"; // json | csv
  unsigned workers = 1;
  bool timing = false;
  ProphetOptions prophet;
  /// Success means score >= fraction * benchmark. A number, or "gap" for
  /// 1/k with k the gap algorithm's bucket count for this n.
  std::optional<std::string> success_fraction;
  std::vector<std::size_t> n_list;  // sweep only
  std::size_t test_cap = kDefaultTestCap;
};

struct Report {
  std::string strategy;
  std::string instance;
  std::string order;
  std::size_t n = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double mean = 0.0;
  double se = 0.0;
  double benchmark = 0.0;
  double benchmark_se = 0.0;
  std::optional<double> ratio;  // benchmark / mean, only when mean > 0
  double accept_rate = 0.0;
  std::optional<double> conditional_mean;  // score given acceptance
  std::optional<double> conditional_se;
  std::optional<double> success_fraction;
  std::optional<double> success_rate;
  std::optional<double> wall_time;
};

/// Sum with a fixed pairwise tree: the result depends only on the values and
/// their order, never on how trials were scheduled.
double pairwise_sum(std::span<const double> values);

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};
MeanSe mean_and_se(std::span<const double> values);

Report run_experiment(const ExperimentConfig& config);

/// Runs trials and aggregates them into a report using an existing model.
Report run_trials(const InstanceModel& model, const StrategyBinding& strategy,
                  const ExperimentConfig& config);

struct SweepRow {
  std::size_t n = 0;
  std::optional<Report> report;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::optional<double> fitted_c;  // least squares ratio ~ c ln n over rows with a ratio
};

/// One report per n in config.n_list (ascending, nonempty); a failing cell is
/// recorded and the sweep continues.
SweepResult sweep(const ExperimentConfig& config);

/// Plays a single game with a transcript.
TrialResult play_single(const ExperimentConfig& config, std::uint64_t trial_index = 0);

nlohmann::json report_to_json(const Report& report);
std::string reports_to_csv(const std::vector<Report>& reports);
std::string sweep_to_csv(const SweepResult& result);
nlohmann::json sweep_to_json(const SweepResult& result);

inline constexpr const char* kReportSchema = "penbench.report/1";
inline constexpr const char* kSweepSchema = "penbench.sweep/1";

}  // namespace penbench
