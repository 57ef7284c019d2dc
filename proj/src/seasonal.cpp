#include "triarb/seasonal.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace triarb {

namespace {

struct Tally {
  std::size_t count = 0;
  std::int64_t label_sum = 0;

  ProfileEntry entry() const {
    return {count, count > 0 ? static_cast<double>(label_sum) / static_cast<double>(count) : 0.0};
  }
};

}  // namespace

HourlyProfile hourly_profile(std::span<const ArbitrageOpportunity> ops) {
  std::array<Tally, 24> tally{};
  for (const auto& op : ops) {
    Tally& t = tally[static_cast<std::size_t>(hour_of_day(op.start))];
    ++t.count;
    t.label_sum += op.duration_label;
  }
  HourlyProfile profile;
  for (std::size_t h = 0; h < 24; ++h) profile.hours[h] = tally[h].entry();
  return profile;
}

DailyProfile daily_profile(std::span<const ArbitrageOpportunity> ops, const SeriesWindow& window) {
  window.validate();
  std::vector<std::int64_t> days;
  for (std::int64_t d = day_index(window.start); d <= day_index(window.end - 1); ++d) {
    const Timestamp noon = d * kSecondsPerDay + 12 * kSecondsPerHour;
    if (!window.weekdays || window.weekdays->count(weekday_of(noon)) > 0) days.push_back(d);
  }
  std::vector<Tally> tally(days.size());
  for (const auto& op : ops) {
    const auto it = std::lower_bound(days.begin(), days.end(), day_index(op.start));
    if (it == days.end() || *it != day_index(op.start)) {
      throw std::invalid_argument("opportunity at " + format_iso(op.start) + " lies outside the window");
    }
    Tally& t = tally[static_cast<std::size_t>(it - days.begin())];
    ++t.count;
    t.label_sum += op.duration_label;
  }
  DailyProfile profile;
  for (std::size_t i = 0; i < days.size(); ++i) {
    const ProfileEntry e = tally[i].entry();
    profile.days.push_back({days[i], e.count, e.mean_duration});
  }
  return profile;
}

HourSet parse_hour_set(std::string_view text) {
  HourSet hours;
  auto parse_hour = [&](std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    int h = -1;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), h);
    if (ec != std::errc{} || ptr != s.data() + s.size() || h < 0 || h > 23) {
      throw std::invalid_argument("bad hour '" + std::string(s) + "'");
    }
    return h;
  };
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.find_first_not_of(' ') == std::string_view::npos) continue;
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) {
      hours.set(static_cast<std::size_t>(parse_hour(item)));
      continue;
    }
    const int a = parse_hour(item.substr(0, dash));
    const int b = parse_hour(item.substr(dash + 1));
    if (a > b) throw std::invalid_argument("hour range '" + std::string(item) + "' is reversed");
    for (int h = a; h <= b; ++h) hours.set(static_cast<std::size_t>(h));
  }
  return hours;
}

std::string format_hour_set(const HourSet& hours) {
  std::string out;
  int h = 0;
  while (h < 24) {
    if (!hours.test(static_cast<std::size_t>(h))) {
      ++h;
      continue;
    }
    int end = h;
    while (end + 1 < 24 && hours.test(static_cast<std::size_t>(end + 1))) ++end;
    if (!out.empty()) out += ',';
    out += end == h ? fmt::format("{}", h) : fmt::format("{}-{}", h, end);
    h = end + 1;
  }
  return out;
}

SessionTable SessionTable::defaults() {
  SessionTable t;
  t.set("Asia", parse_hour_set("0-10"));
  t.set("Europe", parse_hour_set("7-17"));
  t.set("Americas", parse_hour_set("13-23"));
  return t;
}

void SessionTable::set(std::string name, HourSet hours) {
  for (Market& m : markets_) {
    if (m.name == name) {
      m.hours = hours;
      return;
    }
  }
  markets_.push_back({std::move(name), hours});
}

int session_overlap_count(const SessionTable& table, int hour) {
  if (hour < 0 || hour >= 24) throw std::invalid_argument(fmt::format("hour {} out of range", hour));
  int n = 0;
  for (const auto& m : table.markets()) n += m.hours.test(static_cast<std::size_t>(hour)) ? 1 : 0;
  return n;
}

void write_hourly_csv(std::ostream& out, const HourlyProfile& profile) {
  out << "hour,count,mean_duration\n";
  for (std::size_t h = 0; h < 24; ++h) {
    out << fmt::format("{},{},{:.6f}\n", h, profile.hours[h].count, profile.hours[h].mean_duration);
  }
}

void write_daily_csv(std::ostream& out, const DailyProfile& profile) {
  out << "date,count,mean_duration\n";
  for (const auto& d : profile.days) {
    out << fmt::format("{},{},{:.6f}\n", format_date(d.day), d.count, d.mean_duration);
  }
}

}  // namespace triarb
