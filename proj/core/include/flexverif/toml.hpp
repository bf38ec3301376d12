#pragma once

// Minimal TOML subset reader covering the study-config format: bare keys,
// basic ("...") and literal ('...') strings, integers, floats, booleans,
// single-line arrays, [table] / [dotted.table] headers and [[array-of-
// tables]] headers. Inline tables and multi-line strings are not supported.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "flexverif/errors.hpp"

namespace flexverif::toml {

class Value;
using Array = std::vector<Value>;

class Value {
 public:
  Value() : v_(false) {}
  explicit Value(std::string s) : v_(std::move(s)) {}
  explicit Value(double d) : v_(d) {}
  explicit Value(long long i) : v_(i) {}
  explicit Value(bool b) : v_(b) {}
  explicit Value(Array a) : v_(std::move(a)) {}

  bool is_string() const { return std::holds_alternative<std::string>(v_); }
  bool is_number() const {
    return std::holds_alternative<double>(v_) ||
           std::holds_alternative<long long>(v_);
  }
  bool is_int() const { return std::holds_alternative<long long>(v_); }
  bool is_bool() const { return std::holds_alternative<bool>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }

  const std::string& as_string() const { return std::get<std::string>(v_); }
  double as_number() const {
    return is_int() ? static_cast<double>(std::get<long long>(v_))
                    : std::get<double>(v_);
  }
  long long as_int() const { return std::get<long long>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const Array& as_array() const { return std::get<Array>(v_); }

 private:
  std::variant<std::string, double, long long, bool, Array> v_;
};

struct Table {
  std::map<std::string, Value> entries;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> table_arrays;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  const Value& get(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_number(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<double> get_number_array(const std::string& key) const;

  std::optional<std::string> opt_string(const std::string& key) const;
  std::optional<double> opt_number(const std::string& key) const;
  std::optional<bool> opt_bool(const std::string& key) const;
};

/// Throws ConfigError with a line reference on malformed input.
Table parse(std::string_view text);
Table parse_file(const std::string& path);

}  // namespace flexverif::toml
