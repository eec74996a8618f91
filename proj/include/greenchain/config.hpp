#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "greenchain/csv.hpp"
#include "greenchain/error.hpp"

namespace greenchain {

/// Flat `key = value` file. '#' starts a comment; list values are comma separated.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::string& name) {
    KeyValueConfig cfg;
    cfg.name_ = name;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      ++line_no;
      auto line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = csv::trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw SchemaViolation(name + ":" + std::to_string(line_no) + ": expected 'key = value'");
      std::string key(csv::trim(line.substr(0, eq)));
      std::string value(csv::trim(line.substr(eq + 1)));
      if (key.empty()) throw SchemaViolation(name + ":" + std::to_string(line_no) + ": empty key");
      if (cfg.values_.count(key))
        throw SchemaViolation(name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
      cfg.values_[key] = value;
      cfg.lines_[key] = line_no;
    }
    return cfg;
  }

  static KeyValueConfig load(const std::filesystem::path& path) {
    return parse(csv::read_file(path), path.filename().string());
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key, const std::string& fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }

  double number(const std::string& key, double fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    auto v = csv::try_parse_number(it->second);
    if (!v) throw SchemaViolation(where(key) + ": expected a number for '" + key + "'");
    return *v;
  }

  bool flag(const std::string& key, bool fallback) const {
    used_.insert(key);
    auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const auto& v = it->second;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw SchemaViolation(where(key) + ": expected true/false for '" + key + "'");
  }

  std::vector<std::string> list(const std::string& key) const {
    used_.insert(key);
    std::vector<std::string> out;
    auto it = values_.find(key);
    if (it == values_.end()) return out;
    for (auto& f : csv::split_line(it->second))
      if (!f.empty()) out.push_back(f);
    return out;
  }

  /// Keys present in the file that no accessor asked for.
  std::vector<std::string> unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) out.push_back(k);
    return out;
  }

  std::string where(const std::string& key) const {
    auto it = lines_.find(key);
    return name_ + (it == lines_.end() ? "" : ":" + std::to_string(it->second));
  }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;
  mutable std::set<std::string> used_;
};

}  // namespace greenchain
