#include "motiondrift/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "motiondrift/errors.hpp"
#include "motiondrift/format.hpp"

namespace motiondrift {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in, const std::string& source) {
  KeyValueConfig cfg;
  std::string line;
  for (std::size_t no = 1; std::getline(in, line); ++no) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    const std::string where = source + ":" + std::to_string(no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ConfigError(where + ": empty key");
    if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = trim(t.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, path.string());
}

void KeyValueConfig::set(const std::string& key, const std::string& value) { values_[key] = value; }

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const auto v = parse_number(it->second);
  if (!v) throw ConfigError("config key '" + key + "' expects a number, got '" + it->second + "'");
  return *v;
}

std::uint64_t KeyValueConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  const std::string& s = it->second;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> KeyValueConfig::get_list(const std::string& key,
                                                  const std::vector<std::string>& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("config key '" + key + "' has an empty list item");
    out.push_back(item);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "' is an empty list");
  return out;
}

void KeyValueConfig::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + " = " + value + "\n";
  return out;
}

}  // namespace motiondrift
