#include "penbench/config_file.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "penbench/errors.hpp"

namespace penbench {

namespace {

using json = nlohmann::json;

class LineReader {
 public:
  LineReader(std::string_view line, std::size_t line_no) : s_(line), line_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const { throw ConfigError(what, line_, pos_ + 1); }

  void skip_space() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool at_end_or_comment() {
    skip_space();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }
  bool eat(char c) {
    skip_space();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string key() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_' ||
                                s_[pos_] == '-')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  json value() {
    skip_space();
    if (pos_ >= s_.size()) fail("expected a value");
    char c = s_[pos_];
    if (c == '"') return string_value();
    if (c == '[') return array_value();
    if (s_.compare(pos_, 4, "true") == 0) {
      pos_ += 4;
      return true;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      pos_ += 5;
      return false;
    }
    return number_value();
  }

 private:
  json string_value() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: --pos_; fail("unsupported escape");
        }
      } else {
        out += c;
      }
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  json array_value() {
    ++pos_;
    json out = json::array();
    if (eat(']')) return out;
    do {
      skip_space();
      json v = value();
      if (!v.is_number()) fail("arrays may only hold numbers");
      out.push_back(std::move(v));
    } while (eat(','));
    if (!eat(']')) fail("expected ',' or ']'");
    return out;
  }

  json number_value() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.' ||
                                s_[pos_] == '+' || s_[pos_] == '-' || s_[pos_] == '_')) {
      ++pos_;
    }
    std::string text;
    for (char c : s_.substr(start, pos_ - start)) {
      if (c != '_') text += c;
    }
    std::size_t end_pos = pos_;
    pos_ = start;
    if (text.empty()) fail("expected a value");
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (*first == '+') ++first;
    if (text.find_first_of(".eE") == std::string::npos) {
      std::int64_t v = 0;
      auto [end, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && end == last) {
        pos_ = end_pos;
        if (v >= 0) return static_cast<std::uint64_t>(v);
        return v;
      }
    } else {
      double v = 0;
      auto [end, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && end == last) {
        pos_ = end_pos;
        return v;
      }
    }
    fail("invalid value '" + text + "'");
  }

  std::string_view s_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json parse_toml_subset(std::string_view text) {
  json doc = json::object();
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    LineReader reader(line, line_no);
    if (reader.at_end_or_comment()) continue;
    if (reader.eat('[')) reader.fail("tables are not supported; use top-level keys");
    std::string key = reader.key();
    if (!reader.eat('=')) reader.fail("expected '=' after key");
    json value = reader.value();
    if (!reader.at_end_or_comment()) reader.fail("unexpected text after value");
    if (doc.contains(key)) reader.fail("duplicate key '" + key + "'");
    doc[key] = std::move(value);
  }
  return doc;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::string text = buffer.str();
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return json::parse(text);
    } catch (const json::parse_error& e) {
      std::size_t line = 1, column = 1;
      for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
          ++line;
          column = 1;
        } else {
          ++column;
        }
      }
      throw ConfigError(std::string("invalid JSON config: ") + e.what(), line, column);
    }
  }
  return parse_toml_subset(text);
}

namespace {

std::uint64_t as_count(const json& v, const std::string& key) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d >= 0 && d <= 1e18 && d == std::floor(d)) return static_cast<std::uint64_t>(d);
  }
  throw ConfigError("config key '" + key + "' must be a nonnegative integer");
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

}  // namespace

void apply_config(const nlohmann::json& doc, ExperimentConfig& config) {
  if (!doc.is_object()) throw ConfigError("config must be an object of keys");
  for (const auto& [key, v] : doc.items()) {
    if (key == "strategy") {
      config.strategy = as_string(v, key);
    } else if (key == "instance") {
      config.instance = as_string(v, key);
    } else if (key == "n") {
      config.n = as_count(v, key);
    } else if (key == "order") {
      config.order = as_string(v, key);
    } else if (key == "trials") {
      config.trials = as_count(v, key);
    } else if (key == "seed") {
      config.seed = as_count(v, key);
    } else if (key == "out") {
      config.out = as_string(v, key);
    } else if (key == "format") {
      config.format = as_string(v, key);
      if (config.format != "json" && config.format != "csv") {
        throw ConfigError("config key 'format' must be \"json\" or \"csv\"");
      }
    } else if (key == "workers") {
      auto w = as_count(v, key);
      if (w < 1 || w > 1024) throw ConfigError("config key 'workers' must be in 1..1024");
      config.workers = static_cast<unsigned>(w);
    } else if (key == "timing") {
      if (!v.is_boolean()) throw ConfigError("config key 'timing' must be true or false");
      config.timing = v.get<bool>();
    } else if (key == "smooth") {
      if (!v.is_boolean()) throw ConfigError("config key 'smooth' must be true or false");
      config.prophet.smooth = v.get<bool>();
    } else if (key == "epsilon") {
      if (!v.is_number() || !(v.get<double>() >= 0.0)) {
        throw ConfigError("config key 'epsilon' must be a number >= 0");
      }
      config.prophet.epsilon = v.get<double>();
    } else if (key == "success_fraction") {
      if (v.is_number()) {
        char buffer[32];
        std::snprintf(buffer, sizeof buffer, "%.17g", v.get<double>());
        config.success_fraction = buffer;
      } else {
        config.success_fraction = as_string(v, key);
      }
    } else if (key == "n_list") {
      if (!v.is_array()) throw ConfigError("config key 'n_list' must be an array of integers");
      config.n_list.clear();
      for (const auto& item : v) config.n_list.push_back(as_count(item, key));
    } else if (key == "test_cap") {
      config.test_cap = as_count(v, key);
      if (config.test_cap < 1) throw ConfigError("config key 'test_cap' must be >= 1");
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

}  // namespace penbench
