#pragma once

// Flat key/value configuration read from a TOML subset (key = value lines,
// '#' comments, quoted or bare strings) or from a flat JSON object.

#include "wadg/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace wadg {

class Config {
public:
  static Config parse_toml(const std::string& text) {
    Config c;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      line = strip_comment(line);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') throw ConfigError("line " + std::to_string(lineno) + ": tables are not supported");
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
      if (val.size() >= 2 && (val.front() == '"' || val.front() == '\'')) {
        if (val.back() != val.front()) throw ConfigError("line " + std::to_string(lineno) + ": unterminated string");
        val = val.substr(1, val.size() - 2);
      }
      c.set(key, val);
    }
    return c;
  }

  static Config parse_json(const std::string& text) {
    Config c;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("JSON config must be an object");
    for (const auto& [k, v] : j.items()) {
      if (v.is_object() || v.is_array()) throw ConfigError("JSON config must be flat (key '" + k + "')");
      c.set(k, v.is_string() ? v.get<std::string>() : v.dump());
    }
    return c;
  }

  /// Reads a file, choosing JSON when the extension is .json or the first
  /// non-blank character is '{'.
  static Config load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << is.rdbuf();
    const std::string text = ss.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    const bool json = (path.size() > 5 && path.substr(path.size() - 5) == ".json") ||
                      (first != std::string::npos && text[first] == '{');
    return json ? parse_json(text) : parse_toml(text);
  }

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Throws ConfigError naming the first key not in `allowed`.
  void reject_unknown(const std::set<std::string>& allowed) const {
    for (const auto& [k, v] : values_)
      if (!allowed.count(k)) throw ConfigError("unknown config key '" + k + "'");
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto it = values_.find(key);
    return it == values_.end() ? def : it->second;
  }
  double get_double(const std::string& key, double def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' expects a number, got '" + it->second + "'");
    }
  }
  int get_int(const std::string& key, int def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    try {
      std::size_t pos = 0;
      const long v = std::stol(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return static_cast<int>(v);
    } catch (const std::exception&) {
      throw ConfigError("config key '" + key + "' expects an integer, got '" + it->second + "'");
    }
  }
  bool get_bool(const std::string& key, bool def) const {
    auto it = values_.find(key);
    if (it == values_.end()) return def;
    std::string v = it->second;
    std::transform(v.begin(), v.end(), v.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' expects a boolean, got '" + it->second + "'");
  }

  /// Resolved configuration, one "key = value" line per entry.
  std::string echo() const {
    std::ostringstream os;
    for (const auto& [k, v] : values_) os << k << " = " << quote_if_needed(v) << '\n';
    return os.str();
  }

private:
  static std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  }
  static std::string strip_comment(const std::string& s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (quote) {
        if (s[i] == quote) quote = 0;
      } else if (s[i] == '"' || s[i] == '\'') {
        quote = s[i];
      } else if (s[i] == '#') {
        return s.substr(0, i);
      }
    }
    return s;
  }
  static std::string quote_if_needed(const std::string& v) {
    char* end = nullptr;
    std::strtod(v.c_str(), &end);
    const bool numeric = !v.empty() && end && *end == '\0';
    if (numeric || v == "true" || v == "false") return v;
    return '"' + v + '"';
  }

  std::map<std::string, std::string> values_;
};

} // namespace wadg
