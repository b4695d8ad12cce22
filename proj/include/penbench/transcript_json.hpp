#pragma once

#include <json.hpp>

#include "penbench/engine.hpp"
#include "penbench/instance.hpp"

namespace penbench {

/// Transcript layout (docs/transcript_schema.md):
///   {"score": x, "accepted_index": i|null, "steps": [
///      {"index": i, "thresholds": [..], "outcomes": [..], "decision": "accept"|"reject",
///       "cumulative": c}, ...]}
/// An outcome is {"kind": "pass"} or {"kind": "fail", "observed": x}.
/// Infinite thresholds are written as the string "inf".
nlohmann::json transcript_to_json(const GameResult& result);
GameResult transcript_from_json(const nlohmann::json& doc);

/// {"values": [...], "order": "uniform|fixed|generated", "benchmark": x, "provenance": {...}}
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& doc);

}  // namespace penbench
