#pragma once

#include <map>
#include <string>
#include <vector>

#include "tempath/types.hpp"

namespace tempath {

// Flat key = value configuration file: one pair per line, '#' comments,
// dotted key names, list values space-separated.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_list(const std::string& key) const;

  // ConfigError on any key outside the schema.
  void require_known(const std::vector<std::string>& allowed) const;

  const std::map<std::string, std::string>& items() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace tempath
