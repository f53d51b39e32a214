#pragma once

// Flat key = value configuration files, a TOML subset: one assignment per
// line, `#` comments, values are numbers, booleans, "strings" or (possibly
// nested) [arrays]. No tables.

#include <cctype>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "epiwave/util/csv.hpp"

namespace epiwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<double, bool, std::string, Array> data;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

class FlatConfig {
 public:
  static FlatConfig parse(std::string_view text, const std::string& origin = "<config>") {
    FlatConfig cfg;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++line_no;
      const std::string where = origin + ":" + std::to_string(line_no);
      Cursor c{line, 0, where};
      c.skip_ws();
      if (c.done() || c.peek() == '#') continue;
      std::string key = c.key();
      c.skip_ws();
      if (c.done() || c.peek() != '=') throw ConfigError(where + ": expected '=' after " + key);
      ++c.i;
      ConfigValue v = c.value();
      c.skip_ws();
      if (!c.done() && c.peek() != '#') throw ConfigError(where + ": trailing text");
      if (!cfg.values_.emplace(key, std::move(v)).second) {
        throw ConfigError(where + ": duplicate key '" + key + "'");
      }
    }
    return cfg;
  }

  static FlatConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  /// Keys present in the file but never read; used to reject typos.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!read_.count(k)) out.push_back(k);
    return out;
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    return as_number(at(key), key);
  }
  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    return as_integer(at(key), key);
  }
  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto* b = std::get_if<bool>(&at(key).data);
    if (!b) throw ConfigError("config key '" + key + "' must be true or false");
    return *b;
  }
  std::string string(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto* s = std::get_if<std::string>(&at(key).data);
    if (!s) throw ConfigError("config key '" + key + "' must be a string");
    return *s;
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    std::vector<double> out;
    for (const auto& v : array(key)) out.push_back(as_number(v, key));
    return out;
  }
  std::vector<long long> integers(const std::string& key, std::vector<long long> fallback) const {
    if (!has(key)) return fallback;
    std::vector<long long> out;
    for (const auto& v : array(key)) out.push_back(as_integer(v, key));
    return out;
  }
  std::vector<std::string> strings(const std::string& key,
                                   std::vector<std::string> fallback) const {
    if (!has(key)) return fallback;
    std::vector<std::string> out;
    for (const auto& v : array(key)) {
      const auto* s = std::get_if<std::string>(&v.data);
      if (!s) throw ConfigError("config key '" + key + "' must hold strings");
      out.push_back(*s);
    }
    return out;
  }
  /// Array of integer pairs, e.g. [[21, 7], [21, 14]].
  std::vector<std::pair<long long, long long>> integer_pairs(
      const std::string& key, std::vector<std::pair<long long, long long>> fallback) const {
    if (!has(key)) return fallback;
    std::vector<std::pair<long long, long long>> out;
    for (const auto& v : array(key)) {
      const auto* pair = std::get_if<ConfigValue::Array>(&v.data);
      if (!pair || pair->size() != 2) {
        throw ConfigError("config key '" + key + "' must hold [a, b] pairs");
      }
      out.emplace_back(as_integer((*pair)[0], key), as_integer((*pair)[1], key));
    }
    return out;
  }

 private:
  struct Cursor {
    std::string_view s;
    std::size_t i;
    const std::string& where;

    bool done() const { return i >= s.size() || s[i] == '\r'; }
    char peek() const { return s[i]; }
    void skip_ws() {
      while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
    std::string key() {
      const std::size_t start = i;
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' ||
                              s[i] == '-' || s[i] == '.'))
        ++i;
      if (i == start) throw ConfigError(where + ": expected a key");
      return std::string(s.substr(start, i - start));
    }
    ConfigValue value() {
      skip_ws();
      if (done()) throw ConfigError(where + ": missing value");
      const char c = peek();
      if (c == '"') {
        ++i;
        std::string out;
        while (i < s.size() && s[i] != '"') {
          if (s[i] == '\\' && i + 1 < s.size()) ++i;
          out.push_back(s[i++]);
        }
        if (i >= s.size()) throw ConfigError(where + ": unterminated string");
        ++i;
        return {out};
      }
      if (c == '[') {
        ++i;
        ConfigValue::Array arr;
        skip_ws();
        if (!done() && peek() == ']') {
          ++i;
          return {arr};
        }
        while (true) {
          arr.push_back(value());
          skip_ws();
          if (done()) throw ConfigError(where + ": unterminated array");
          if (peek() == ',') {
            ++i;
            skip_ws();
            if (!done() && peek() == ']') {
              ++i;
              return {arr};
            }
            continue;
          }
          if (peek() == ']') {
            ++i;
            return {arr};
          }
          throw ConfigError(where + ": expected ',' or ']'");
        }
      }
      const std::size_t start = i;
      while (i < s.size() && s[i] != ',' && s[i] != ']' && s[i] != '#' && s[i] != ' ' &&
             s[i] != '\t' && s[i] != '\r')
        ++i;
      const std::string_view tok = s.substr(start, i - start);
      if (tok == "true") return {true};
      if (tok == "false") return {false};
      std::string cleaned;
      for (char ch : tok)
        if (ch != '_') cleaned.push_back(ch);
      try {
        return {csv::parse_double(cleaned, "value")};
      } catch (const csv::ParseError&) {
        throw ConfigError(where + ": cannot parse value '" + std::string(tok) + "'");
      }
    }
  };

  const ConfigValue& at(const std::string& key) const {
    read_[key] = true;
    return values_.at(key);
  }
  const ConfigValue::Array& array(const std::string& key) const {
    const auto* a = std::get_if<ConfigValue::Array>(&at(key).data);
    if (!a) throw ConfigError("config key '" + key + "' must be an array");
    return *a;
  }
  static double as_number(const ConfigValue& v, const std::string& key) {
    const auto* d = std::get_if<double>(&v.data);
    if (!d) throw ConfigError("config key '" + key + "' must be numeric");
    return *d;
  }
  static long long as_integer(const ConfigValue& v, const std::string& key) {
    const double d = as_number(v, key);
    if (d != static_cast<double>(static_cast<long long>(d))) {
      throw ConfigError("config key '" + key + "' must be an integer");
    }
    return static_cast<long long>(d);
  }

  std::map<std::string, ConfigValue> values_;
  mutable std::map<std::string, bool> read_;
};

}  // namespace epiwave
