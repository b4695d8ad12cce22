#include "penbench/transcript_json.hpp"

#include <cmath>
#include <limits>

#include "penbench/errors.hpp"

namespace penbench {

using nlohmann::json;

namespace {

json encode_threshold(double value) {
  if (std::isinf(value)) return "inf";
  return value;
}

double decode_threshold(const json& value) {
  if (value.is_string()) {
    if (value.get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    throw ValidationError("unknown threshold literal '" + value.get<std::string>() + "'");
  }
  return value.get<double>();
}

}  // namespace

json transcript_to_json(const GameResult& result) {
  json steps = json::array();
  for (const auto& step : result.transcript) {
    json thresholds = json::array();
    for (double t : step.thresholds) thresholds.push_back(encode_threshold(t));
    json outcomes = json::array();
    for (const auto& outcome : step.outcomes) {
      if (outcome.passed()) {
        outcomes.push_back({{"kind", "pass"}});
      } else {
        outcomes.push_back({{"kind", "fail"}, {"observed", outcome.observed()}});
      }
    }
    steps.push_back({{"index", step.index},
                     {"thresholds", thresholds},
                     {"outcomes", outcomes},
                     {"decision", step.decision == StepRecord::Decision::accept ? "accept" : "reject"},
                     {"cumulative", encode_threshold(step.cumulative_spent)}});
  }
  json doc = {{"score", result.score}, {"steps", steps}};
  doc["accepted_index"] = result.accepted_index ? json(*result.accepted_index) : json(nullptr);
  return doc;
}

GameResult transcript_from_json(const json& doc) {
  GameResult result;
  result.score = doc.at("score").get<double>();
  if (!doc.at("accepted_index").is_null()) {
    result.accepted_index = doc.at("accepted_index").get<std::size_t>();
  }
  for (const auto& entry : doc.at("steps")) {
    StepRecord step;
    step.index = entry.at("index").get<std::size_t>();
    for (const auto& t : entry.at("thresholds")) step.thresholds.push_back(decode_threshold(t));
    for (const auto& o : entry.at("outcomes")) {
      auto kind = o.at("kind").get<std::string>();
      if (kind == "pass") {
        step.outcomes.push_back(StepOutcome::pass());
      } else if (kind == "fail") {
        step.outcomes.push_back(StepOutcome::fail(o.at("observed").get<double>()));
      } else {
        throw ValidationError("unknown outcome kind '" + kind + "'");
      }
    }
    auto decision = entry.at("decision").get<std::string>();
    if (decision != "accept" && decision != "reject") {
      throw ValidationError("unknown decision '" + decision + "'");
    }
    step.decision =
        decision == "accept" ? StepRecord::Decision::accept : StepRecord::Decision::reject;
    if (entry.contains("cumulative")) step.cumulative_spent = decode_threshold(entry["cumulative"]);
    result.transcript.push_back(std::move(step));
  }
  result.steps_played = result.transcript.size();
  if (result.accepted_index) {
    result.accepted_spent = result.transcript.back().cumulative_spent;
  }
  return result;
}

json instance_to_json(const Instance& instance) {
  json provenance = {{"generator", instance.provenance.generator}};
  json params = json::object();
  for (const auto& [key, value] : instance.provenance.params) params[key] = value;
  provenance["params"] = params;
  provenance["seed"] =
      instance.provenance.seed ? json(*instance.provenance.seed) : json(nullptr);
  return {{"values", instance.values},
          {"order", to_string(instance.order)},
          {"benchmark", instance.benchmark},
          {"provenance", provenance}};
}

Instance instance_from_json(const json& doc) {
  Provenance provenance;
  if (doc.contains("provenance")) {
    const auto& p = doc["provenance"];
    provenance.generator = p.value("generator", std::string("file"));
    if (p.contains("params")) {
      for (const auto& [key, value] : p["params"].items()) {
        provenance.params[key] = value.get<double>();
      }
    }
    if (p.contains("seed") && !p["seed"].is_null()) provenance.seed = p["seed"].get<std::uint64_t>();
  }
  auto order = order_model_from_string(doc.value("order", std::string("fixed")));
  Instance instance =
      make_instance(doc.at("values").get<std::vector<double>>(), order, std::move(provenance));
  if (doc.contains("benchmark") && doc["benchmark"].get<double>() != instance.benchmark) {
    throw ValidationError("instance benchmark does not equal the maximum value");
  }
  return instance;
}

}  // namespace penbench
