#include "triarb/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "triarb/errors.hpp"

namespace triarb {

std::string_view trim_view(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = text.find(sep, pos);
    out.emplace_back(trim_view(text.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

KeyValueConfig KeyValueConfig::parse(std::string_view text) {
  KeyValueConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim_view(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string_view key = trim_view(line.substr(0, eq));
    if (key.empty()) throw ParseError("empty key", line_no);
    cfg.entries_.push_back({std::string(key), std::string(trim_view(line.substr(eq + 1))), line_no});
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

bool KeyValueConfig::has(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyValueConfig::get(std::string_view key) const {
  std::optional<std::string> out;
  for (const auto& e : entries_) {
    if (e.key == key) out = e.value;
  }
  return out;
}

std::vector<KeyValueConfig::Entry> KeyValueConfig::get_all(std::string_view key) const {
  std::vector<Entry> out;
  for (const auto& e : entries_) {
    if (e.key == key) out.push_back(e);
  }
  return out;
}

void KeyValueConfig::set(std::string key, std::string value) {
  std::erase_if(entries_, [&](const Entry& e) { return e.key == key; });
  add(std::move(key), std::move(value));
}

void KeyValueConfig::add(std::string key, std::string value) {
  entries_.push_back({std::move(key), std::move(value), 0});
}

std::string KeyValueConfig::dump() const {
  std::string out;
  for (const auto& e : entries_) out += e.key + " = " + e.value + "\n";
  return out;
}

std::map<std::string, std::string> parse_fields(std::string_view text) {
  std::map<std::string, std::string> out;
  for (const std::string& item : split(text, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      out[item] = "";
    } else {
      out[std::string(trim_view(std::string_view(item).substr(0, eq)))] =
          std::string(trim_view(std::string_view(item).substr(eq + 1)));
    }
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  text = trim_view(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("bad number '" + std::string(text) + "' for " + std::string(what));
  }
  return v;
}

std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    if (!item.empty()) out.push_back(parse_double(item, what));
  }
  return out;
}

}  // namespace triarb
