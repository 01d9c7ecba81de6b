#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace bip {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sectioned key-value config file:
//
//   [section]
//   key = value      # comment
//
// Keys are addressed as "section.key". Values are parsed on demand.
// Every lookup records the resolved value so a run manifest can dump the
// full effective configuration, defaults included.
class Config {
 public:
  Config() = default;

  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  double get_double(const std::string& key, double def) const;
  int get_int(const std::string& key, int def) const;
  bool get_bool(const std::string& key, bool def) const;
  std::string get_string(const std::string& key, const std::string& def) const;
  // Comma-separated integer list ("256,128,64").
  std::vector<int> get_int_list(const std::string& key,
                                const std::vector<int>& def) const;
  std::vector<std::string> get_string_list(
      const std::string& key, const std::vector<std::string>& def) const;

  void set(const std::string& key, const std::string& value) {
    values_[key] = value;
  }

  // All keys that were looked up, with their resolved values.
  const std::map<std::string, std::string>& resolved() const {
    return resolved_;
  }
  const std::map<std::string, std::string>& raw_values() const {
    return values_;
  }

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace bip
