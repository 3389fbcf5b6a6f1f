#pragma once
// Flat key=value configuration files with [section] headers and '#'
// comments. Lookups are strict: after reading, ensure_all_consumed()
// reports any key the caller never asked about, so typos fail fast.

#include <map>
#include <set>
#include <string>
#include <vector>

namespace declip {

class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key,
                  const std::string& fallback) const;
  int get_int(const std::string& section, const std::string& key,
              int fallback) const;
  double get_double(const std::string& section, const std::string& key,
                    double fallback) const;
  bool get_bool(const std::string& section, const std::string& key,
                bool fallback) const;
  std::vector<int> get_int_list(const std::string& section,
                                const std::string& key,
                                std::vector<int> fallback) const;
  std::vector<double> get_double_list(const std::string& section,
                                      const std::string& key,
                                      std::vector<double> fallback) const;

  // Throws listing every key that was present but never read.
  void ensure_all_consumed() const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> value
  mutable std::set<std::string> consumed_;
};

}  // namespace declip
