#include "declip/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace declip {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
  KeyValueConfig cfg;
  std::istringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full))
      throw std::invalid_argument("config: duplicate key " + full);
    cfg.values_[full] = value;
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

bool KeyValueConfig::has(const std::string& section,
                         const std::string& key) const {
  const std::string full = section.empty() ? key : section + "." + key;
  consumed_.insert(full);
  return values_.count(full) > 0;
}

std::string KeyValueConfig::get(const std::string& section,
                                const std::string& key,
                                const std::string& fallback) const {
  const std::string full = section.empty() ? key : section + "." + key;
  consumed_.insert(full);
  const auto it = values_.find(full);
  return it == values_.end() ? fallback : it->second;
}

int KeyValueConfig::get_int(const std::string& section, const std::string& key,
                            int fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  std::size_t used = 0;
  const int r = std::stoi(v, &used);
  if (used != v.size())
    throw std::invalid_argument("config: bad integer for " + section + "." + key);
  return r;
}

double KeyValueConfig::get_double(const std::string& section,
                                  const std::string& key,
                                  double fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  std::size_t used = 0;
  const double r = std::stod(v, &used);
  if (used != v.size())
    throw std::invalid_argument("config: bad number for " + section + "." + key);
  return r;
}

bool KeyValueConfig::get_bool(const std::string& section,
                              const std::string& key, bool fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument("config: bad boolean for " + section + "." + key);
}

std::vector<int> KeyValueConfig::get_int_list(const std::string& section,
                                              const std::string& key,
                                              std::vector<int> fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  std::vector<int> out;
  for (const auto& item : split_list(v)) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> KeyValueConfig::get_double_list(
    const std::string& section, const std::string& key,
    std::vector<double> fallback) const {
  const std::string v = get(section, key, "");
  if (v.empty()) return fallback;
  std::vector<double> out;
  for (const auto& item : split_list(v)) out.push_back(std::stod(item));
  return out;
}

void KeyValueConfig::ensure_all_consumed() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (!consumed_.count(key)) {
      if (!unknown.empty()) unknown += ", ";
      unknown += key;
    }
  }
  if (!unknown.empty())
    throw std::invalid_argument("config: unknown keys: " + unknown);
}

}  // namespace declip
