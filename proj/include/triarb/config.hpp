#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace triarb {

// `key = value` lines; '#' starts a comment; keys may repeat.
class KeyValueConfig {
 public:
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  static KeyValueConfig parse(std::string_view text);
  static KeyValueConfig load(const std::filesystem::path& path);

  bool has(std::string_view key) const;
  /// Last value for key.
  std::optional<std::string> get(std::string_view key) const;
  std::vector<Entry> get_all(std::string_view key) const;
  const std::vector<Entry>& entries() const { return entries_; }

  void set(std::string key, std::string value);
  void add(std::string key, std::string value);
  std::string dump() const;

 private:
  std::vector<Entry> entries_;
};

std::vector<std::string> split(std::string_view text, char sep);
std::string_view trim_view(std::string_view text);

// "k=v" items joined by ','; bare items map to "".
std::map<std::string, std::string> parse_fields(std::string_view text);

double parse_double(std::string_view text, std::string_view what);
std::vector<double> parse_double_list(std::string_view text, std::string_view what);

}  // namespace triarb
