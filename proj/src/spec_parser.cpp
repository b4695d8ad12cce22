#include "penbench/spec_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "penbench/errors.hpp"

namespace penbench {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  SpecNode parse_top() {
    SpecNode node = parse_item(false);
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return node;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(message, 0, pos_ + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  double parse_number() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      bool exponent_sign = (c == '+' || c == '-') && pos_ > start &&
                           (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' ||
          exponent_sign || ((c == '+' || c == '-') && pos_ == start)) {
        ++pos_;
      } else {
        break;
      }
    }
    std::string_view token = text_.substr(start, pos_ - start);
    if (token.empty()) fail("expected a number");
    if (token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
      std::string bad(token);
      pos_ = start;
      fail("malformed number '" + bad + "'");
    }
    return value;
  }

  SpecNode parse_item(bool allow_repeat) {
    skip_space();
    SpecNode node;
    node.column = pos_ + 1;
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
              text_[pos_] == '-')) {
        ++pos_;
      }
      node.name = std::string(text_.substr(start, pos_ - start));
      if (node.name == "inf") {
        node.name.clear();
        node.number = std::numeric_limits<double>::infinity();
      } else if (peek('(')) {
        ++pos_;
        node.has_parens = true;
        if (!peek(')')) {
          node.args.push_back(parse_item(true));
          while (peek(',')) {
            ++pos_;
            node.args.push_back(parse_item(true));
          }
        }
        if (!peek(')')) fail("expected ',' or ')'");
        ++pos_;
      }
    } else {
      node.number = parse_number();
      if (peek(':')) {
        ++pos_;
        node.weight = parse_number();
      }
    }
    if (allow_repeat && peek('*')) {
      ++pos_;
      skip_space();
      std::size_t at = pos_;
      double count = parse_number();
      if (count < 1 || count != std::floor(count) || count > 1e9) {
        pos_ = at;
        fail("repeat count must be a positive integer");
      }
      node.repeat = static_cast<std::size_t>(count);
    }
    return node;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SpecNode parse_spec(std::string_view text) { return Parser(text).parse_top(); }

double node_number(const SpecNode& node, const char* what) {
  if (!node.is_number() || node.weight) {
    throw ConfigError(std::string("expected a number for ") + what, 0, node.column);
  }
  return *node.number;
}

std::size_t node_count(const SpecNode& node, const char* what) {
  double value = node_number(node, what);
  if (value < 0 || value != std::floor(value) || value > 1e15) {
    throw ConfigError(std::string("expected a nonnegative integer for ") + what, 0, node.column);
  }
  return static_cast<std::size_t>(value);
}

void expect_args(const SpecNode& node, std::size_t min_args, std::size_t max_args) {
  if (node.args.size() < min_args || node.args.size() > max_args) {
    throw ConfigError("'" + node.name + "' takes " + std::to_string(min_args) +
                          (min_args == max_args ? "" : ".." + std::to_string(max_args)) +
                          " argument(s), got " + std::to_string(node.args.size()),
                      0, node.column);
  }
}

}  // namespace penbench
