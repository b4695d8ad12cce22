#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "penbench/harness.hpp"

namespace penbench {

/// Parses a flat TOML subset: `key = value` lines with strings, numbers,
/// booleans and arrays of numbers; `#` starts a comment. ConfigError carries
/// the 1-based line and column of the offending text.
nlohmann::json parse_toml_subset(std::string_view text);

/// Reads a JSON (by content, `{` first) or TOML-subset file into a flat object.
nlohmann::json load_config_file(const std::string& path);

/// Copies recognised keys onto `config`; unknown keys and wrong types are ConfigError.
void apply_config(const nlohmann::json& doc, ExperimentConfig& config);

}  // namespace penbench
