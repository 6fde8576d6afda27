#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace motiondrift {

/// Flat `key = value` text configuration. Blank lines and lines starting
/// with '#' are ignored; a key may appear once per file.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in, const std::string& source);
  static KeyValueConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  [[nodiscard]] bool has(const std::string& key) const { return values_.count(key) > 0; }
  [[nodiscard]] const std::map<std::string, std::string>& values() const { return values_; }

  /// Typed getters; a present but unparsable value is a ConfigError.
  [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
  [[nodiscard]] double get_double(const std::string& key, double fallback) const;
  [[nodiscard]] std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  [[nodiscard]] std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Throws ConfigError naming the first key not in `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  /// `key = value` lines in key order.
  [[nodiscard]] std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace motiondrift
