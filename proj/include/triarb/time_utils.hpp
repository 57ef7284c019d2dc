#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace triarb {

// Seconds since 1970-01-01T00:00:00Z. All times are GMT/UTC.
using Timestamp = std::int64_t;

inline constexpr std::int64_t kSecondsPerDay = 86400;
inline constexpr std::int64_t kSecondsPerHour = 3600;

enum class Weekday { Sunday = 0, Monday, Tuesday, Wednesday, Thursday, Friday, Saturday };

struct CivilDate {
  int year;
  unsigned month;
  unsigned day;
};

// Sub-second precise instant, used only for tick ordering checks.
struct RawTime {
  Timestamp seconds = 0;
  std::int32_t nanos = 0;

  auto operator<=>(const RawTime&) const = default;
};

std::int64_t days_from_civil(int year, unsigned month, unsigned day);
CivilDate civil_from_days(std::int64_t days);

// Floor division by a day, also correct before the epoch.
std::int64_t day_index(Timestamp t);
int hour_of_day(Timestamp t);
Weekday weekday_of(Timestamp t);

std::string format_iso(Timestamp t);
std::string format_date(std::int64_t day);

// Accepts YYYY-MM-DD, YYYY-MM-DDTHH:MM:SS[.fff][Z|+00:00] (space also allowed
// as separator). Fractional seconds are kept in RawTime::nanos.
std::optional<RawTime> parse_iso(std::string_view text);

// Integer (optionally fractional) epoch seconds.
std::optional<RawTime> parse_epoch(std::string_view text);

// Either form; throws std::invalid_argument on failure.
Timestamp parse_timestamp(std::string_view text);

bool looks_like_iso(std::string_view text);

std::optional<Weekday> parse_weekday(std::string_view text);
std::string_view weekday_name(Weekday d);

}  // namespace triarb
