#include "bip/common/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace bip {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_string(ss.str());
}

Config Config::from_string(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section at line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected key = value at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("empty key at line " + std::to_string(lineno));
    cfg.values_[section.empty() ? key : section + "." + key] = val;
  }
  return cfg;
}

double Config::get_double(const std::string& key, double def) const {
  auto it = values_.find(key);
  double v = def;
  if (it != values_.end()) {
    char* end = nullptr;
    v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
      throw ConfigError("bad numeric value for " + key + ": " + it->second);
  }
  std::ostringstream os;
  os.precision(17);
  os << v;
  resolved_[key] = os.str();
  return v;
}

int Config::get_int(const std::string& key, int def) const {
  auto it = values_.find(key);
  int v = def;
  if (it != values_.end()) {
    char* end = nullptr;
    const long parsed = std::strtol(it->second.c_str(), &end, 10);
    if (end == it->second.c_str() || *end != '\0')
      throw ConfigError("bad integer value for " + key + ": " + it->second);
    v = static_cast<int>(parsed);
  }
  resolved_[key] = std::to_string(v);
  return v;
}

bool Config::get_bool(const std::string& key, bool def) const {
  auto it = values_.find(key);
  bool v = def;
  if (it != values_.end()) {
    const std::string& s = it->second;
    if (s == "true" || s == "1" || s == "yes")
      v = true;
    else if (s == "false" || s == "0" || s == "no")
      v = false;
    else
      throw ConfigError("bad boolean value for " + key + ": " + s);
  }
  resolved_[key] = v ? "true" : "false";
  return v;
}

std::string Config::get_string(const std::string& key,
                               const std::string& def) const {
  auto it = values_.find(key);
  const std::string v = it != values_.end() ? it->second : def;
  resolved_[key] = v;
  return v;
}

std::vector<int> Config::get_int_list(const std::string& key,
                                      const std::vector<int>& def) const {
  auto it = values_.find(key);
  std::vector<int> v;
  if (it == values_.end()) {
    v = def;
  } else {
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      const std::string t = item;
      const long parsed = std::strtol(t.c_str(), &end, 10);
      if (end == t.c_str())
        throw ConfigError("bad integer list for " + key + ": " + it->second);
      v.push_back(static_cast<int>(parsed));
    }
  }
  std::string flat;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) flat += ",";
    flat += std::to_string(v[i]);
  }
  resolved_[key] = flat;
  return v;
}

std::vector<std::string> Config::get_string_list(
    const std::string& key, const std::vector<std::string>& def) const {
  auto it = values_.find(key);
  std::vector<std::string> v;
  if (it == values_.end()) {
    v = def;
  } else {
    std::istringstream ss(it->second);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b != std::string::npos) v.push_back(item.substr(b, e - b + 1));
    }
  }
  std::string flat;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) flat += ",";
    flat += v[i];
  }
  resolved_[key] = flat;
  return v;
}

}  // namespace bip
