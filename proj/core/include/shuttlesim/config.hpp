#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace shuttlesim {

// Minimal TOML-style config: [section] headers, key = value pairs, # comments.
// Values: numbers, booleans, quoted strings, and flat arrays of numbers or
// strings. Keys are addressed as "section.key" (or bare "key" before any
// section header).

class ConfigValue {
 public:
  using Storage = std::variant<double, bool, std::string, std::vector<double>,
                               std::vector<std::string>>;

  ConfigValue() : storage_(0.0) {}
  explicit ConfigValue(Storage s) : storage_(std::move(s)) {}

  double as_double() const;
  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  std::vector<double> as_double_array() const;
  std::vector<std::string> as_string_array() const;

  bool is_array() const {
    return std::holds_alternative<std::vector<double>>(storage_) ||
           std::holds_alternative<std::vector<std::string>>(storage_);
  }

  // serialized form, used for config hashing
  std::string repr() const;

 private:
  Storage storage_;
};

class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  const ConfigValue& at(const std::string& key) const;
  void set(const std::string& key, ConfigValue value);

  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  std::vector<double> get_double_array(const std::string& key,
                                       std::vector<double> fallback) const;

  // canonical key-sorted dump; stable across insertion order
  std::string canonical() const;
  std::uint64_t hash() const;

  const std::map<std::string, ConfigValue>& values() const { return values_; }

 private:
  std::map<std::string, ConfigValue> values_;
};

} // namespace shuttlesim
