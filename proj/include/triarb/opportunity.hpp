#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "triarb/rate_product.hpp"

namespace triarb {

// A maximal run of consecutive grid seconds with gamma > 1.
struct ArbitrageOpportunity {
  Direction direction = Direction::Dir1;
  Timestamp start = 0;
  std::size_t start_index = 0;  // index into the source series
  std::int64_t run_length = 0;
  std::int64_t duration_label = 0;  // seconds; equals run_length on a 1 s grid
  double initial_gamma = 0.0;
  double peak_gamma = 0.0;
  double magnitude_bp = 0.0;  // (peak_gamma - 1) * 1e4

  bool operator==(const ArbitrageOpportunity&) const = default;
};

/// Runs end at gamma <= 1 (including missing-data zeros), at the window
/// edges, and wherever consecutive points are not one second apart.
std::vector<ArbitrageOpportunity> segment_opportunities(const RateProductSeries& series);

inline constexpr std::size_t kDurationBuckets = 6;  // 1s..5s, >5s
inline constexpr std::array<const char*, kDurationBuckets> kDurationBucketNames = {
    "1s", "2s", "3s", "4s", "5s", ">5s"};

struct DurationStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  std::int64_t min = 0;
  std::int64_t max = 0;
  std::array<double, kDurationBuckets> bucket_pct{};
};

DurationStats duration_stats(std::span<const ArbitrageOpportunity> ops);

struct ThresholdRow {
  double threshold_bp = 0.0;
  std::size_t count = 0;
  double mean_duration = 0.0;
};

/// Threshold 0 counts every opportunity (peak > 1); a positive threshold
/// counts magnitude_bp >= threshold. Thresholds must be ascending.
std::vector<ThresholdRow> threshold_table(std::span<const ArbitrageOpportunity> ops,
                                          std::span<const double> thresholds_bp);

std::vector<double> default_thresholds_bp();

// Mean and population variance; partial results merge exactly in a fixed order.
class MomentAccumulator {
 public:
  void add(double x);
  void merge(const MomentAccumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const { return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0; }

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  double bin_width = 0.0;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  double bin_lower(std::size_t i) const { return lo + static_cast<double>(i) * bin_width; }
  double bin_upper(std::size_t i) const {
    return i + 1 == counts.size() ? hi : lo + static_cast<double>(i + 1) * bin_width;
  }
  std::size_t total() const;
};

struct DistributionStats {
  std::size_t points = 0;   // every grid second, including missing ones
  std::size_t missing = 0;  // gamma == 0 seconds
  double mean = 0.0;        // over non-missing points
  double stdev = 0.0;       // population
  Histogram histogram;      // non-missing points only
};

DistributionStats distribution_stats(const RateProductSeries& series, double bin_width, double lo,
                                     double hi);
/// Pools several series (e.g. both directions of a triangle).
DistributionStats distribution_stats(std::span<const RateProductSeries> series, double bin_width,
                                     double lo, double hi);

struct PeriodStats {
  std::string label;
  DistributionStats distribution;
  DurationStats durations;
};

struct ComparisonRow {
  std::string label;
  std::size_t count = 0;
  std::array<double, kDurationBuckets> bucket_pct{};
  double mean = 0.0;
  double stdev = 0.0;
};

// Change from one period to the next.
struct PeriodDelta {
  std::string from;
  std::string to;
  std::int64_t delta_count = 0;
  double delta_pct_1s = 0.0;
  double delta_mean = 0.0;
  double delta_stdev = 0.0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::vector<PeriodDelta> deltas;
};

ComparisonReport compare_periods(std::span<const PeriodStats> periods);

void write_opportunities_csv(std::ostream& out, std::span<const ArbitrageOpportunity> ops);
nlohmann::ordered_json to_json(const DurationStats& stats);
nlohmann::ordered_json to_json(const DistributionStats& stats);
void write_threshold_csv(std::ostream& out, std::span<const ThresholdRow> rows);
void write_histogram_csv(std::ostream& out, const DistributionStats& stats);
void write_comparison_csv(std::ostream& out, const ComparisonReport& report);
void write_comparison_deltas_csv(std::ostream& out, const ComparisonReport& report);

}  // namespace triarb
