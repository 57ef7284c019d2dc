#pragma once

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triarb/market_data.hpp"
#include "triarb/opportunity.hpp"

namespace triarb {

struct ProfileEntry {
  std::size_t count = 0;
  double mean_duration = 0.0;
};

// Opportunities are attributed to the hour (GMT) of their first second.
struct HourlyProfile {
  std::array<ProfileEntry, 24> hours{};
};

struct DailyEntry {
  std::int64_t day = 0;  // days since epoch
  std::size_t count = 0;
  double mean_duration = 0.0;
};

struct DailyProfile {
  std::vector<DailyEntry> days;
};

HourlyProfile hourly_profile(std::span<const ArbitrageOpportunity> ops);

/// One entry per calendar day admitted by the window.
DailyProfile daily_profile(std::span<const ArbitrageOpportunity> ops, const SeriesWindow& window);

using HourSet = std::bitset<24>;

/// "0-10", "7-17,20", "" (empty). Ranges are inclusive.
HourSet parse_hour_set(std::string_view text);
std::string format_hour_set(const HourSet& hours);

class SessionTable {
 public:
  struct Market {
    std::string name;
    HourSet hours;
  };

  /// Asia 0-10, Europe 7-17, Americas 13-23 (GMT).
  static SessionTable defaults();

  void set(std::string name, HourSet hours);
  const std::vector<Market>& markets() const { return markets_; }

 private:
  std::vector<Market> markets_;
};

/// Number of markets liquid at `hour`; throws std::invalid_argument outside [0, 24).
int session_overlap_count(const SessionTable& table, int hour);

void write_hourly_csv(std::ostream& out, const HourlyProfile& profile);
void write_daily_csv(std::ostream& out, const DailyProfile& profile);

}  // namespace triarb
