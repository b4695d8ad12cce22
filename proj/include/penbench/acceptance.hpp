#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace penbench {

struct AcceptanceOptions {
  /// A tenth of the trials; absolute slacks widen by sqrt(10).
  bool fast = false;
  double timeout_seconds = 300.0;
  std::vector<int> only;  // empty: every criterion
  std::uint64_t seed = 20240601;
  unsigned workers = 0;   // 0: hardware concurrency
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  nlohmann::json measured;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 9;

/// Runs the selected criteria in order. A criterion that throws or exceeds
/// the timeout fails with the reason in `detail`.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options);

/// "PASS  3  name  detail  (1.2 s)"
std::string format_result_line(const CriterionResult& result);

nlohmann::json acceptance_to_json(const std::vector<CriterionResult>& results);

}  // namespace penbench
