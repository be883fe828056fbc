#ifndef PLATOON_CONFIG_HPP
#define PLATOON_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "platoon/errors.hpp"

namespace platoon::io {

/// Nested key-value configuration: INI-style sections, `key = value` lines,
/// `#` comments. Keys are addressed as "section.key". A single file drives an
/// entire experiment and is echoed verbatim into outputs for provenance.
class Config {
 public:
  static Config parse_file(const std::filesystem::path& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::vector<double> numbers(const std::string& key) const;  // comma-separated

  void set(const std::string& key, const std::string& value);

  /// Canonical "key = value" listing, sorted by key.
  std::vector<std::string> dump() const;

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace platoon::io

#endif
