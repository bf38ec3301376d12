#include "flexverif/toml.hpp"

#include <fmt/format.h>

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace flexverif::toml {

namespace {

[[noreturn]] void fail(int line, const std::string& msg) {
  throw ConfigError(fmt::format("config line {}: {}", line, msg));
}

struct Scanner {
  std::string_view s;
  size_t i = 0;
  int line;

  void skip_space() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool done_or_comment() {
    skip_space();
    return i >= s.size() || s[i] == '#';
  }
  char peek() const { return i < s.size() ? s[i] : '\0'; }
};

std::string scan_basic_string(Scanner& sc) {
  ++sc.i;  // opening quote
  std::string out;
  while (sc.i < sc.s.size() && sc.s[sc.i] != '"') {
    char c = sc.s[sc.i];
    if (c == '\\') {
      ++sc.i;
      if (sc.i >= sc.s.size()) fail(sc.line, "dangling escape");
      char e = sc.s[sc.i];
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default:
          fail(sc.line, fmt::format("unsupported escape '\\{}'", e));
      }
    } else {
      out += c;
    }
    ++sc.i;
  }
  if (sc.peek() != '"') fail(sc.line, "unterminated string");
  ++sc.i;
  return out;
}

std::string scan_literal_string(Scanner& sc) {
  ++sc.i;  // opening quote
  std::string out;
  while (sc.i < sc.s.size() && sc.s[sc.i] != '\'') out += sc.s[sc.i++];
  if (sc.peek() != '\'') fail(sc.line, "unterminated literal string");
  ++sc.i;
  return out;
}

Value scan_value(Scanner& sc);

Value scan_array(Scanner& sc) {
  ++sc.i;  // '['
  Array items;
  sc.skip_space();
  if (sc.peek() == ']') {
    ++sc.i;
    return Value(std::move(items));
  }
  for (;;) {
    sc.skip_space();
    items.push_back(scan_value(sc));
    sc.skip_space();
    if (sc.peek() == ',') {
      ++sc.i;
      continue;
    }
    if (sc.peek() == ']') {
      ++sc.i;
      return Value(std::move(items));
    }
    fail(sc.line, "expected ',' or ']' in array");
  }
}

Value scan_value(Scanner& sc) {
  sc.skip_space();
  char c = sc.peek();
  if (c == '"') return Value(scan_basic_string(sc));
  if (c == '\'') return Value(scan_literal_string(sc));
  if (c == '[') return scan_array(sc);
  // bare token: number or boolean
  size_t start = sc.i;
  while (sc.i < sc.s.size() && sc.s[sc.i] != ',' && sc.s[sc.i] != ']' &&
         sc.s[sc.i] != '#' && sc.s[sc.i] != ' ' && sc.s[sc.i] != '\t')
    ++sc.i;
  std::string tok(sc.s.substr(start, sc.i - start));
  if (tok == "true") return Value(true);
  if (tok == "false") return Value(false);
  if (tok.empty()) fail(sc.line, "expected a value");
  bool is_float = tok.find_first_of(".eE") != std::string::npos;
  char* end = nullptr;
  if (is_float) {
    double d = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size())
      fail(sc.line, fmt::format("malformed number '{}'", tok));
    return Value(d);
  }
  long long v = std::strtoll(tok.c_str(), &end, 10);
  if (end != tok.c_str() + tok.size())
    fail(sc.line, fmt::format("malformed value '{}'", tok));
  return Value(v);
}

std::string scan_key(Scanner& sc) {
  sc.skip_space();
  if (sc.peek() == '"') return scan_basic_string(sc);
  if (sc.peek() == '\'') return scan_literal_string(sc);
  size_t start = sc.i;
  while (sc.i < sc.s.size()) {
    char c = sc.s[sc.i];
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')
      ++sc.i;
    else
      break;
  }
  if (sc.i == start) fail(sc.line, "expected a key");
  return std::string(sc.s.substr(start, sc.i - start));
}

std::vector<std::string> split_dotted(Scanner& sc) {
  std::vector<std::string> parts{scan_key(sc)};
  sc.skip_space();
  while (sc.peek() == '.') {
    ++sc.i;
    parts.push_back(scan_key(sc));
    sc.skip_space();
  }
  return parts;
}

}  // namespace

const Value& Table::get(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end())
    throw ConfigError(fmt::format("missing config key '{}'", key));
  return it->second;
}

std::string Table::get_string(const std::string& key) const {
  const Value& v = get(key);
  if (!v.is_string())
    throw ConfigError(fmt::format("config key '{}' must be a string", key));
  return v.as_string();
}

double Table::get_number(const std::string& key) const {
  const Value& v = get(key);
  if (!v.is_number())
    throw ConfigError(fmt::format("config key '{}' must be a number", key));
  return v.as_number();
}

bool Table::get_bool(const std::string& key) const {
  const Value& v = get(key);
  if (!v.is_bool())
    throw ConfigError(fmt::format("config key '{}' must be a boolean", key));
  return v.as_bool();
}

std::vector<double> Table::get_number_array(const std::string& key) const {
  const Value& v = get(key);
  if (!v.is_array())
    throw ConfigError(fmt::format("config key '{}' must be an array", key));
  std::vector<double> out;
  for (const auto& item : v.as_array()) {
    if (!item.is_number())
      throw ConfigError(
          fmt::format("config key '{}' must contain only numbers", key));
    out.push_back(item.as_number());
  }
  return out;
}

std::optional<std::string> Table::opt_string(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_string(key);
}

std::optional<double> Table::opt_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_number(key);
}

std::optional<bool> Table::opt_bool(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return get_bool(key);
}

Table parse(std::string_view text) {
  Table root;
  Table* current = &root;

  int line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    Scanner sc{line, 0, line_no};
    if (sc.done_or_comment()) continue;

    if (sc.peek() == '[') {
      ++sc.i;
      bool array_of_tables = sc.peek() == '[';
      if (array_of_tables) ++sc.i;
      std::vector<std::string> path = split_dotted(sc);
      if (array_of_tables) {
        if (sc.peek() != ']' || sc.i + 1 >= sc.s.size() ||
            sc.s[sc.i + 1] != ']')
          fail(line_no, "expected ']]'");
        sc.i += 2;
        Table* parent = &root;
        for (size_t k = 0; k + 1 < path.size(); ++k)
          parent = &parent->tables[path[k]];
        parent->table_arrays[path.back()].emplace_back();
        current = &parent->table_arrays[path.back()].back();
      } else {
        if (sc.peek() != ']') fail(line_no, "expected ']'");
        ++sc.i;
        Table* t = &root;
        for (const auto& part : path) t = &t->tables[part];
        current = t;
      }
      if (!sc.done_or_comment()) fail(line_no, "trailing input after header");
      continue;
    }

    std::string key = scan_key(sc);
    sc.skip_space();
    if (sc.peek() != '=') fail(line_no, "expected '=' after key");
    ++sc.i;
    Value v = scan_value(sc);
    if (!sc.done_or_comment()) fail(line_no, "trailing input after value");
    if (!current->entries.emplace(key, std::move(v)).second)
      fail(line_no, fmt::format("duplicate key '{}'", key));
  }
  return root;
}

Table parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

}  // namespace flexverif::toml
