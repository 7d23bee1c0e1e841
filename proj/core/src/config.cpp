#include "shuttlesim/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace shuttlesim {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  std::ostringstream os;
  os << origin << ":" << line << ": " << what;
  throw std::runtime_error(os.str());
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

bool parse_number(const std::string& tok, double& out) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc{} && ptr == end;
}

ConfigValue parse_scalar(const std::string& tok, const std::string& origin, int line) {
  if (tok.empty()) fail(origin, line, "empty value");
  if (tok == "true") return ConfigValue{true};
  if (tok == "false") return ConfigValue{false};
  if (tok.front() == '"') {
    if (tok.size() < 2 || tok.back() != '"') fail(origin, line, "unterminated string");
    return ConfigValue{tok.substr(1, tok.size() - 2)};
  }
  double num = 0.0;
  if (!parse_number(tok, num)) fail(origin, line, "cannot parse value '" + tok + "'");
  return ConfigValue{num};
}

ConfigValue parse_value(const std::string& raw, const std::string& origin, int line) {
  const std::string tok = trim(raw);
  if (tok.empty()) fail(origin, line, "missing value");
  if (tok.front() != '[') return parse_scalar(tok, origin, line);
  if (tok.back() != ']') fail(origin, line, "unterminated array");

  std::vector<std::string> parts;
  std::string cur;
  bool in_string = false;
  for (std::size_t i = 1; i + 1 < tok.size(); ++i) {
    const char c = tok[i];
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (in_string) fail(origin, line, "unterminated string in array");
  if (!trim(cur).empty()) parts.push_back(trim(cur));

  if (parts.empty()) return ConfigValue{std::vector<double>{}};
  if (parts.front().front() == '"') {
    std::vector<std::string> out;
    for (const auto& p : parts) {
      if (p.size() < 2 || p.front() != '"' || p.back() != '"') {
        fail(origin, line, "mixed or malformed string array");
      }
      out.push_back(p.substr(1, p.size() - 2));
    }
    return ConfigValue{std::move(out)};
  }
  std::vector<double> out;
  for (const auto& p : parts) {
    double num = 0.0;
    if (!parse_number(p, num)) fail(origin, line, "bad array element '" + p + "'");
    out.push_back(num);
  }
  return ConfigValue{std::move(out)};
}

} // namespace

double ConfigValue::as_double() const {
  if (const auto* d = std::get_if<double>(&storage_)) return *d;
  throw std::runtime_error("config value is not a number");
}

std::int64_t ConfigValue::as_int() const {
  const double d = as_double();
  const double r = std::round(d);
  if (std::abs(d - r) > 1e-9) throw std::runtime_error("config value is not an integer");
  return static_cast<std::int64_t>(r);
}

bool ConfigValue::as_bool() const {
  if (const auto* b = std::get_if<bool>(&storage_)) return *b;
  throw std::runtime_error("config value is not a boolean");
}

const std::string& ConfigValue::as_string() const {
  if (const auto* s = std::get_if<std::string>(&storage_)) return *s;
  throw std::runtime_error("config value is not a string");
}

std::vector<double> ConfigValue::as_double_array() const {
  if (const auto* v = std::get_if<std::vector<double>>(&storage_)) return *v;
  if (const auto* d = std::get_if<double>(&storage_)) return {*d};
  throw std::runtime_error("config value is not a numeric array");
}

std::vector<std::string> ConfigValue::as_string_array() const {
  if (const auto* v = std::get_if<std::vector<std::string>>(&storage_)) return *v;
  if (const auto* s = std::get_if<std::string>(&storage_)) return {*s};
  throw std::runtime_error("config value is not a string array");
}

std::string ConfigValue::repr() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* d = std::get_if<double>(&storage_)) {
    os << *d;
  } else if (const auto* b = std::get_if<bool>(&storage_)) {
    os << (*b ? "true" : "false");
  } else if (const auto* s = std::get_if<std::string>(&storage_)) {
    os << '"' << *s << '"';
  } else if (const auto* v = std::get_if<std::vector<double>>(&storage_)) {
    os << '[';
    for (std::size_t i = 0; i < v->size(); ++i) os << (i ? "," : "") << (*v)[i];
    os << ']';
  } else if (const auto* v2 = std::get_if<std::vector<std::string>>(&storage_)) {
    os << '[';
    for (std::size_t i = 0; i < v2->size(); ++i) os << (i ? "," : "") << '"' << (*v2)[i] << '"';
    os << ']';
  }
  return os.str();
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside strings
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_string = !in_string;
      if (line[i] == '#' && !in_string) {
        line.erase(i);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(origin, lineno, "empty section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) fail(origin, lineno, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) fail(origin, lineno, "duplicate key '" + full + "'");
    cfg.values_.emplace(full, parse_value(line.substr(eq + 1), origin, lineno));
  }
  return cfg;
}

const ConfigValue& Config::at(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw std::runtime_error("missing config key '" + key + "'");
  return it->second;
}

void Config::set(const std::string& key, ConfigValue value) {
  values_[key] = std::move(value);
}

double Config::get_double(const std::string& key, double fallback) const {
  return contains(key) ? at(key).as_double() : fallback;
}

double Config::require_double(const std::string& key) const { return at(key).as_double(); }

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return contains(key) ? at(key).as_int() : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const {
  return contains(key) ? at(key).as_bool() : fallback;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return contains(key) ? at(key).as_string() : fallback;
}

std::string Config::require_string(const std::string& key) const { return at(key).as_string(); }

std::vector<double> Config::get_double_array(const std::string& key,
                                             std::vector<double> fallback) const {
  return contains(key) ? at(key).as_double_array() : std::move(fallback);
}

std::string Config::canonical() const {
  std::ostringstream os;
  for (const auto& [k, v] : values_) os << k << "=" << v.repr() << "\n";
  return os.str();
}

std::uint64_t Config::hash() const {
  // FNV-1a over the canonical dump
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace shuttlesim
