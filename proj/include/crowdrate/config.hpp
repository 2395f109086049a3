#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace crowdrate {

struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<std::int64_t, double, bool, std::string, Array> value;
};

// Flat two-level configuration: [section] key = value. Reads the TOML subset
// used by the run files (strings, integers, floats, booleans, nested arrays,
// comments) and JSON objects of the same shape.
class Config {
public:
  using Schema = std::map<std::string, std::set<std::string>>;

  static Config parse_toml(std::string_view text);
  static Config from_json(const nlohmann::json& j);
  // A .json path may be a bare config object or a manifest with a "config"
  // member. Throws Error("config") when unreadable.
  static Config load(const std::string& path);

  nlohmann::json to_json() const;

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const { return data_.count(section) > 0; }
  void set(const std::string& section, const std::string& key, ConfigValue v);
  // "section.key=value" with a TOML value.
  void set_assignment(std::string_view assignment);

  // Throws Error("config") naming the first unknown section or key.
  void validate(const Schema& schema) const;

  double number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& section, const std::string& key) const;
  std::size_t count(const std::string& section, const std::string& key, std::size_t fallback) const;
  std::uint64_t seed(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool flag(const std::string& section, const std::string& key, bool fallback) const;
  std::string text(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;
  std::vector<std::vector<double>> rows(const std::string& section, const std::string& key) const;

private:
  const ConfigValue& get(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, ConfigValue>> data_;
};

ConfigValue parse_toml_value(std::string_view text);

}  // namespace crowdrate
