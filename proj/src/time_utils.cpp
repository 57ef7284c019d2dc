#include "triarb/time_utils.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include <fmt/format.h>

namespace triarb {

// Proleptic Gregorian conversions (H. Hinnant's days_from_civil).
std::int64_t days_from_civil(int year, unsigned month, unsigned day) {
  const int y = year - (month <= 2 ? 1 : 0);
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (month > 2 ? month - 3 : month + 9) + 2) / 5 + day - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;
  const unsigned m = mp < 10 ? mp + 3 : mp - 9;
  return {static_cast<int>(y + (m <= 2 ? 1 : 0)), m, d};
}

std::int64_t day_index(Timestamp t) {
  std::int64_t d = t / kSecondsPerDay;
  if (t % kSecondsPerDay < 0) --d;
  return d;
}

int hour_of_day(Timestamp t) {
  const std::int64_t sod = t - day_index(t) * kSecondsPerDay;
  return static_cast<int>(sod / kSecondsPerHour);
}

Weekday weekday_of(Timestamp t) {
  // 1970-01-01 was a Thursday.
  std::int64_t w = (day_index(t) + 4) % 7;
  if (w < 0) w += 7;
  return static_cast<Weekday>(w);
}

std::string format_iso(Timestamp t) {
  const std::int64_t day = day_index(t);
  const CivilDate c = civil_from_days(day);
  const std::int64_t sod = t - day * kSecondsPerDay;
  return fmt::format("{:04d}-{:02d}-{:02d}T{:02d}:{:02d}:{:02d}Z", c.year, c.month, c.day,
                     sod / 3600, (sod / 60) % 60, sod % 60);
}

std::string format_date(std::int64_t day) {
  const CivilDate c = civil_from_days(day);
  return fmt::format("{:04d}-{:02d}-{:02d}", c.year, c.month, c.day);
}

namespace {

bool read_fixed(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  std::from_chars(s.data() + pos, s.data() + pos + len, out);
  return true;
}

// Parses ".ddd" at pos into nanoseconds; returns the index past the digits.
std::size_t read_fraction(std::string_view s, std::size_t pos, std::int32_t& nanos) {
  nanos = 0;
  if (pos >= s.size() || s[pos] != '.') return pos;
  ++pos;
  std::int32_t scale = 100000000;
  const std::size_t begin = pos;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
    nanos += (s[pos] - '0') * scale;
    scale /= 10;
    ++pos;
  }
  return pos == begin ? std::string_view::npos : pos;
}

}  // namespace

bool looks_like_iso(std::string_view text) {
  return text.find('-', 1) != std::string_view::npos || text.find(':') != std::string_view::npos;
}

std::optional<RawTime> parse_iso(std::string_view s) {
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
  if (!read_fixed(s, 0, 4, year) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !read_fixed(s, 5, 2, month) || !read_fixed(s, 8, 2, day)) {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;
  const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const CivilDate back = civil_from_days(days);
  if (back.month != static_cast<unsigned>(month) || back.day != static_cast<unsigned>(day)) return std::nullopt;
  std::int32_t nanos = 0;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != ' ') return std::nullopt;
    if (s.size() < pos + 9 || s[pos + 3] != ':' || s[pos + 6] != ':' ||
        !read_fixed(s, pos + 1, 2, hour) || !read_fixed(s, pos + 4, 2, minute) ||
        !read_fixed(s, pos + 7, 2, second)) {
      return std::nullopt;
    }
    if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
    pos = read_fraction(s, pos + 9, nanos);
    if (pos == std::string_view::npos) return std::nullopt;
    const std::string_view zone = s.substr(pos);
    if (!(zone.empty() || zone == "Z" || zone == "+00:00" || zone == "+0000")) {
      return std::nullopt;
    }
  }
  const Timestamp t = days * kSecondsPerDay + hour * kSecondsPerHour + minute * 60 + second;
  return RawTime{t, nanos};
}

std::optional<RawTime> parse_epoch(std::string_view s) {
  if (s.empty()) return std::nullopt;
  const bool negative = s.front() == '-';
  const std::size_t start = negative ? 1 : 0;
  std::size_t pos = start;
  while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
  if (pos == start) return std::nullopt;
  Timestamp whole = 0;
  auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + pos, whole);
  if (ec != std::errc{}) return std::nullopt;
  std::int32_t nanos = 0;
  pos = read_fraction(s, pos, nanos);
  if (pos != s.size()) return std::nullopt;
  if (negative) {
    whole = -whole;
    if (nanos > 0) {
      whole -= 1;
      nanos = 1000000000 - nanos;
    }
  }
  return RawTime{whole, nanos};
}

Timestamp parse_timestamp(std::string_view text) {
  const auto parsed = looks_like_iso(text) ? parse_iso(text) : parse_epoch(text);
  if (!parsed) throw std::invalid_argument("invalid timestamp '" + std::string(text) + "'");
  return parsed->seconds;
}

namespace {
constexpr std::array<std::string_view, 7> kWeekdayNames = {"sun", "mon", "tue", "wed",
                                                           "thu", "fri", "sat"};
}

std::optional<Weekday> parse_weekday(std::string_view text) {
  if (text.size() < 3) return std::nullopt;
  std::string key;
  for (std::size_t i = 0; i < 3; ++i) {
    key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
  }
  for (std::size_t i = 0; i < kWeekdayNames.size(); ++i) {
    if (kWeekdayNames[i] == key) return static_cast<Weekday>(i);
  }
  return std::nullopt;
}

std::string_view weekday_name(Weekday d) { return kWeekdayNames[static_cast<std::size_t>(d)]; }

}  // namespace triarb
