#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace penbench {

/// Parse tree for the small call-like spec language shared by distribution
/// and instance specs:
///
///   spec   := call | number [':' number]
///   call   := ident [ '(' [ item (',' item)* ] ')' ]
///   item   := spec [ '*' integer ]
///   ident  := [A-Za-z_][A-Za-z0-9_-]*
///
/// Whitespace between tokens is ignored. Columns are 1-based.
struct SpecNode {
  std::string name;                // empty for a numeric literal
  std::optional<double> number;    // numeric literal
  std::optional<double> weight;    // second half of `v:w`
  std::vector<SpecNode> args;
  bool has_parens = false;
  std::size_t repeat = 1;          // `item * count`
  std::size_t column = 1;

  bool is_number() const { return number.has_value(); }
};

/// Throws ConfigError (with column) on malformed input.
SpecNode parse_spec(std::string_view text);

/// Helpers for interpreting nodes; all throw ConfigError with the node's column.
double node_number(const SpecNode& node, const char* what);
std::size_t node_count(const SpecNode& node, const char* what);
void expect_args(const SpecNode& node, std::size_t min_args, std::size_t max_args);

}  // namespace penbench
