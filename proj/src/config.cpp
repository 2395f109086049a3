#include "crowdrate/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "crowdrate/error.hpp"

namespace crowdrate {

using nlohmann::json;

namespace {

class ValueParser {
public:
  explicit ValueParser(std::string_view s) : s_(s) {}

  ConfigValue parse_all() {
    ConfigValue v = parse();
    skip_space();
    if (pos_ != s_.size()) fail("config", "trailing characters after value: " + std::string(s_.substr(pos_)));
    return v;
  }

private:
  void skip_space() {
    while (pos_ < s_.size()) {
      const char c = s_[pos_];
      if (c == '#') {
        while (pos_ < s_.size() && s_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  ConfigValue parse() {
    skip_space();
    if (pos_ >= s_.size()) fail("config", "missing value");
    const char c = s_[pos_];
    if (c == '[') return parse_array();
    if (c == '"') return {parse_string()};
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return {true};
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return {false};
    }
    return parse_number();
  }

  ConfigValue parse_array() {
    ++pos_;
    ConfigValue::Array out;
    for (;;) {
      skip_space();
      if (pos_ >= s_.size()) fail("config", "unterminated array");
      if (s_[pos_] == ']') {
        ++pos_;
        return {std::move(out)};
      }
      out.push_back(parse());
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ',') ++pos_;
      else if (pos_ < s_.size() && s_[pos_] != ']') fail("config", "expected ',' or ']' in array");
    }
  }

  std::string parse_string() {
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      char c = s_[pos_++];
      if (c == '\\') {
        if (pos_ >= s_.size()) break;
        const char e = s_[pos_++];
        c = e == 'n' ? '\n' : e == 't' ? '\t' : e;
      }
      out.push_back(c);
    }
    if (pos_ >= s_.size()) fail("config", "unterminated string");
    ++pos_;
    return out;
  }

  ConfigValue parse_number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '+' ||
                                s_[pos_] == '-' || s_[pos_] == '.' || s_[pos_] == '_'))
      ++pos_;
    std::string tok;
    for (char c : s_.substr(start, pos_ - start))
      if (c != '_') tok.push_back(c);
    if (tok.empty()) fail("config", "unexpected character in value");
    if (tok == "inf" || tok == "+inf") return {std::numeric_limits<double>::infinity()};
    if (tok == "-inf") return {-std::numeric_limits<double>::infinity()};
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t i = 0;
      const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
      auto [p, ec] = std::from_chars(b, tok.data() + tok.size(), i);
      if (ec == std::errc() && p == tok.data() + tok.size()) return {i};
    }
    double d = 0.0;
    const char* b = tok.data() + (tok[0] == '+' ? 1 : 0);
    auto [p, ec] = std::from_chars(b, tok.data() + tok.size(), d);
    if (ec != std::errc() || p != tok.data() + tok.size() || std::isnan(d))
      fail("config", "invalid number '" + tok + "'");
    return {d};
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

int bracket_depth(std::string_view line) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
    } else if (c == '"') {
      in_string = true;
    } else if (c == '#') {
      break;
    } else if (c == '[') {
      ++depth;
    } else if (c == ']') {
      --depth;
    }
  }
  return depth;
}

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

bool valid_name(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) return false;
  return true;
}

ConfigValue from_json_value(const json& j) {
  if (j.is_boolean()) return {j.get<bool>()};
  if (j.is_number_integer()) return {j.get<std::int64_t>()};
  if (j.is_number_unsigned()) return {static_cast<std::int64_t>(j.get<std::uint64_t>())};
  if (j.is_number_float()) return {j.get<double>()};
  if (j.is_string()) return {j.get<std::string>()};
  if (j.is_array()) {
    ConfigValue::Array a;
    for (const auto& e : j) a.push_back(from_json_value(e));
    return {std::move(a)};
  }
  fail("config", "unsupported JSON value in config");
}

json to_json_value(const ConfigValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConfigValue::Array>) {
          json a = json::array();
          for (const auto& e : x) a.push_back(to_json_value(e));
          return a;
        } else if constexpr (std::is_same_v<T, double>) {
          // JSON has no infinities; they round-trip as strings.
          if (std::isinf(x)) return json(x > 0 ? "inf" : "-inf");
          return json(x);
        } else {
          return json(x);
        }
      },
      v.value);
}

double as_number(const ConfigValue& v, const std::string& where) {
  if (const auto* i = std::get_if<std::int64_t>(&v.value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&v.value)) return *d;
  if (const auto* s = std::get_if<std::string>(&v.value)) {
    if (*s == "inf") return std::numeric_limits<double>::infinity();
    if (*s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  fail("config", where + " must be a number");
}

}  // namespace

ConfigValue parse_toml_value(std::string_view text) { return ValueParser(text).parse_all(); }

Config Config::parse_toml(std::string_view text) {
  Config cfg;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t[0] == '[') {
      const auto close = t.find(']');
      if (close == std::string::npos) fail("config", where + "unterminated section header");
      const std::string rest = trim(std::string_view(t).substr(close + 1));
      if (!rest.empty() && rest[0] != '#') fail("config", where + "text after section header");
      section = trim(std::string_view(t).substr(1, close - 1));
      if (!valid_name(section)) fail("config", where + "invalid section name '" + section + "'");
      cfg.data_[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("config", where + "expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    if (!valid_name(key)) fail("config", where + "invalid key '" + key + "'");
    if (section.empty()) fail("config", where + "key outside of a section");
    std::string value = t.substr(eq + 1);
    while (bracket_depth(value) > 0 && std::getline(in, line)) {
      ++line_no;
      value += "\n" + line;
    }
    if (cfg.data_[section].count(key)) fail("config", where + "duplicate key '" + key + "'");
    try {
      cfg.data_[section][key] = parse_toml_value(value);
    } catch (const Error& e) {
      fail("config", where + e.what());
    }
  }
  return cfg;
}

Config Config::from_json(const json& j) {
  if (!j.is_object()) fail("config", "config JSON must be an object of sections");
  Config cfg;
  for (const auto& [section, body] : j.items()) {
    if (!body.is_object()) fail("config", "section '" + section + "' must be an object");
    auto& s = cfg.data_[section];
    for (const auto& [key, v] : body.items()) s[key] = from_json_value(v);
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::exception& e) {
      fail("config", std::string("invalid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("config") && j.contains("command")) return from_json(j["config"]);
    return from_json(j);
  }
  return parse_toml(text);
}

json Config::to_json() const {
  json j = json::object();
  for (const auto& [section, body] : data_) {
    json s = json::object();
    for (const auto& [key, v] : body) s[key] = to_json_value(v);
    j[section] = s;
  }
  return j;
}

bool Config::has(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  return it != data_.end() && it->second.count(key) > 0;
}

void Config::set(const std::string& section, const std::string& key, ConfigValue v) {
  data_[section][key] = std::move(v);
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos || dot > eq)
    fail("config", "override must look like section.key=value");
  const std::string section = trim(assignment.substr(0, dot));
  const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
  if (!valid_name(section) || !valid_name(key)) fail("config", "invalid override name");
  set(section, key, parse_toml_value(assignment.substr(eq + 1)));
}

void Config::validate(const Schema& schema) const {
  for (const auto& [section, body] : data_) {
    const auto it = schema.find(section);
    if (it == schema.end()) fail("config", "unknown section [" + section + "]");
    for (const auto& [key, v] : body)
      if (!it->second.count(key)) fail("config", "unknown key '" + key + "' in [" + section + "]");
  }
}

const ConfigValue& Config::get(const std::string& section, const std::string& key) const {
  const auto it = data_.find(section);
  if (it == data_.end() || !it->second.count(key)) fail("config", "missing " + section + "." + key);
  return it->second.at(key);
}

double Config::number(const std::string& section, const std::string& key) const {
  return as_number(get(section, key), section + "." + key);
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

std::int64_t Config::integer(const std::string& section, const std::string& key) const {
  const auto* i = std::get_if<std::int64_t>(&get(section, key).value);
  if (!i) fail("config", section + "." + key + " must be an integer");
  return *i;
}

std::size_t Config::count(const std::string& section, const std::string& key, std::size_t fallback) const {
  if (!has(section, key)) return fallback;
  const auto i = integer(section, key);
  if (i < 0) fail("config", section + "." + key + " must be non-negative");
  return static_cast<std::size_t>(i);
}

std::uint64_t Config::seed(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  if (!has(section, key)) return fallback;
  return static_cast<std::uint64_t>(integer(section, key));
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
  if (!has(section, key)) return fallback;
  const auto* b = std::get_if<bool>(&get(section, key).value);
  if (!b) fail("config", section + "." + key + " must be true or false");
  return *b;
}

std::string Config::text(const std::string& section, const std::string& key) const {
  const auto* s = std::get_if<std::string>(&get(section, key).value);
  if (!s) fail("config", section + "." + key + " must be a string");
  return *s;
}

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? text(section, key) : fallback;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  const auto* a = std::get_if<ConfigValue::Array>(&get(section, key).value);
  if (!a) fail("config", section + "." + key + " must be an array");
  std::vector<double> out;
  for (const auto& e : *a) out.push_back(as_number(e, section + "." + key));
  return out;
}

std::vector<std::vector<double>> Config::rows(const std::string& section, const std::string& key) const {
  const auto* a = std::get_if<ConfigValue::Array>(&get(section, key).value);
  if (!a) fail("config", section + "." + key + " must be an array of arrays");
  std::vector<std::vector<double>> out;
  for (const auto& row : *a) {
    const auto* r = std::get_if<ConfigValue::Array>(&row.value);
    if (!r) fail("config", section + "." + key + " must be an array of arrays");
    std::vector<double> v;
    for (const auto& e : *r) v.push_back(as_number(e, section + "." + key));
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace crowdrate
