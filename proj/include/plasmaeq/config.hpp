#ifndef PLASMAEQ_CONFIG_HPP
#define PLASMAEQ_CONFIG_HPP

// Reader for the TOML subset used by run configurations: tables, arrays of
// tables, dotted keys, basic and literal strings, integers, floats, booleans,
// arrays (may span lines) and inline tables. Dates are not supported.

#include <cctype>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "plasmaeq/errors.hpp"

namespace plasmaeq {

using Json = nlohmann::json;

namespace detail {

class TomlParser {
 public:
  explicit TomlParser(std::string text) : s_(std::move(text)) {}

  Json parse() {
    Json root = Json::object();
    Json* table = &root;
    while (true) {
      skip_ws_comments_newlines();
      if (eof()) break;
      if (peek() == '[') {
        const bool array = peek(1) == '[';
        pos_ += array ? 2 : 1;
        auto path = parse_key_path();
        skip_ws();
        expect(']');
        if (array) expect(']');
        end_of_line();
        table = array ? &open_array_table(root, path) : &open_table(root, path);
      } else {
        auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        Json v = parse_value();
        assign(*table, path, std::move(v));
        end_of_line();
      }
    }
    return root;
  }

  /// A lone value, e.g. the right side of a --set override.
  Json parse_single_value() {
    skip_ws();
    Json v = parse_value();
    skip_ws();
    if (!eof()) fail("trailing characters after value");
    return v;
  }

 private:
  std::string s_;
  size_t pos_ = 0;

  bool eof() const { return pos_ >= s_.size(); }
  char peek(size_t k = 0) const { return pos_ + k < s_.size() ? s_[pos_ + k] : '\0'; }

  int line() const {
    int l = 1;
    for (size_t i = 0; i < pos_ && i < s_.size(); ++i) l += s_[i] == '\n';
    return l;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line()) + ": " + msg);
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_ws_comments_newlines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        ++pos_;
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (peek() != '\n') fail("unexpected content after value");
    ++pos_;
  }

  static bool bare_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

  std::string parse_key() {
    skip_ws();
    if (peek() == '"' || peek() == '\'') return parse_string();
    const size_t start = pos_;
    while (!eof() && bare_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return s_.substr(start, pos_ - start);
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_key()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      path.push_back(parse_key());
      skip_ws();
    }
    return path;
  }

  std::string parse_string() {
    const char q = peek();
    ++pos_;
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == q) break;
      if (c == '\\' && q == '"') {
        const char e = s_[pos_++];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case 'r': out += '\r'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      } else {
        out += c;
      }
    }
    return out;
  }

  Json parse_number_or_bool() {
    const size_t start = pos_;
    while (!eof() && (bare_char(peek()) || peek() == '.' || peek() == '+')) ++pos_;
    std::string tok = s_.substr(start, pos_ - start);
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "nan" || tok == "+nan" || tok == "-nan") return std::numeric_limits<double>::quiet_NaN();
    std::string clean;
    for (char c : tok)
      if (c != '_') clean += c;
    if (clean.empty()) fail("expected a value");
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    try {
      size_t used = 0;
      if (is_float) {
        const double v = std::stod(clean, &used);
        if (used == clean.size()) return v;
      } else {
        const long long v = std::stoll(clean, &used, 10);
        if (used == clean.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }

  Json parse_value() {
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') {
      ++pos_;
      Json arr = Json::array();
      while (true) {
        skip_ws_comments_newlines();
        if (peek() == ']') {
          ++pos_;
          break;
        }
        arr.push_back(parse_value());
        skip_ws_comments_newlines();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        skip_ws_comments_newlines();
        expect(']');
        break;
      }
      return arr;
    }
    if (c == '{') {
      ++pos_;
      Json obj = Json::object();
      skip_ws();
      if (peek() == '}') {
        ++pos_;
        return obj;
      }
      while (true) {
        auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        assign(obj, path, parse_value());
        skip_ws();
        if (peek() == ',') {
          ++pos_;
          continue;
        }
        expect('}');
        break;
      }
      return obj;
    }
    return parse_number_or_bool();
  }

  void assign(Json& table, const std::vector<std::string>& path, Json v) {
    Json* t = &table;
    for (size_t i = 0; i + 1 < path.size(); ++i) {
      Json& next = (*t)[path[i]];
      if (next.is_null()) next = Json::object();
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*t)[path.back()] = std::move(v);
  }

  Json& descend(Json& root, const std::vector<std::string>& path, size_t upto) {
    Json* t = &root;
    for (size_t i = 0; i < upto; ++i) {
      Json& next = (*t)[path[i]];
      if (next.is_null()) next = Json::object();
      if (next.is_array() && !next.empty() && next.back().is_object()) {
        t = &next.back();
        continue;
      }
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      t = &next;
    }
    return *t;
  }

  Json& open_table(Json& root, const std::vector<std::string>& path) {
    Json& parent = descend(root, path, path.size() - 1);
    Json& t = parent[path.back()];
    if (t.is_null()) t = Json::object();
    if (!t.is_object()) fail("table '" + path.back() + "' redefines a value");
    return t;
  }

  Json& open_array_table(Json& root, const std::vector<std::string>& path) {
    Json& parent = descend(root, path, path.size() - 1);
    Json& arr = parent[path.back()];
    if (arr.is_null()) arr = Json::array();
    if (!arr.is_array()) fail("'" + path.back() + "' is not an array of tables");
    arr.push_back(Json::object());
    return arr.back();
  }
};

}  // namespace detail

inline Json parse_config(const std::string& text) { return detail::TomlParser(text).parse(); }

inline Json load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

/// Apply "a.b.c=value". The value uses config syntax; anything that does not
/// parse is taken as a bare string.
inline void apply_override(Json& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' must look like key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value;
  try {
    value = detail::TomlParser(text).parse_single_value();
  } catch (const ConfigError&) {
    value = text;
  }
  Json* t = &cfg;
  std::stringstream ks(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ks, part, '.')) parts.push_back(part);
  for (size_t i = 0; i + 1 < parts.size(); ++i) {
    Json& next = (*t)[parts[i]];
    if (next.is_null()) next = Json::object();
    if (!next.is_object()) throw ConfigError("override '" + key + "': '" + parts[i] + "' is not a table");
    t = &next;
  }
  (*t)[parts.back()] = std::move(value);
}

/// Typed lookup with default; type mismatch is a ConfigError.
template <class T>
T get_or(const Json& j, const std::string& key, T def) {
  if (!j.is_object() || !j.contains(key)) return def;
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!j.at(key).is_number()) throw ConfigError("");
    }
    return j.at(key).get<T>();
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type (" + j.at(key).dump() + ")");
  }
}

}  // namespace plasmaeq

#endif  // PLASMAEQ_CONFIG_HPP
