#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <string>

namespace diffudict {

// Flat "section.key = value" experiment configuration. '#' starts a comment,
// blank lines are skipped, later assignments win. Serialization emits keys
// in sorted order, so parse(serialize(c)) == c.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config parse_file(const std::filesystem::path& path);

  std::string serialize() const;

  bool has(const std::string& key) const;
  void set(const std::string& key, const std::string& value);

  // Typed getters; the defaulted forms fall back, the required forms throw
  // ConfigError when the key is missing. Bad values always throw.
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  int get_int(const std::string& key, int fallback) const;
  std::uint64_t get_uint64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

}  // namespace diffudict
