#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace penbench {

// A strategy or caller broke the game protocol (acting after the game ended,
// exceeding the per-step test cap, an internal invariant that must hold).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Malformed input value: negative threshold, empty sample list, bad sequence.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a function (alpha not in (0,1]).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact computation refused because the state space would be too large.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad experiment configuration. Carries a 1-based line/column when known.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0 && column == 0) return what;
    std::string where = line ? "line " + std::to_string(line) + ", " : std::string();
    return where + "column " + std::to_string(column) + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace penbench
