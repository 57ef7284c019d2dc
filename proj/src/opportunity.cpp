#include "triarb/opportunity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace triarb {

namespace {

// Absorbs binary rounding of decimal thresholds such as gamma = 1.0001.
constexpr double kThresholdToleranceBp = 1e-9;

std::size_t bucket_of(std::int64_t label) {
  return label >= 6 ? 5 : static_cast<std::size_t>(std::max<std::int64_t>(label, 1) - 1);
}

}  // namespace

std::vector<ArbitrageOpportunity> segment_opportunities(const RateProductSeries& series) {
  std::vector<ArbitrageOpportunity> out;
  const auto& pts = series.points;
  std::size_t i = 0;
  while (i < pts.size()) {
    if (!(pts[i].gamma > 1.0)) {
      ++i;
      continue;
    }
    ArbitrageOpportunity op;
    op.direction = series.direction;
    op.start = pts[i].timestamp;
    op.start_index = i;
    op.initial_gamma = pts[i].gamma;
    op.peak_gamma = pts[i].gamma;
    std::size_t j = i + 1;
    while (j < pts.size() && pts[j].gamma > 1.0 && pts[j].timestamp == pts[j - 1].timestamp + 1) {
      op.peak_gamma = std::max(op.peak_gamma, pts[j].gamma);
      ++j;
    }
    op.run_length = static_cast<std::int64_t>(j - i);
    op.duration_label = op.run_length;
    op.magnitude_bp = (op.peak_gamma - 1.0) * 1e4;
    out.push_back(op);
    i = j;
  }
  return out;
}

DurationStats duration_stats(std::span<const ArbitrageOpportunity> ops) {
  DurationStats stats;
  stats.count = ops.size();
  if (ops.empty()) return stats;

  std::vector<std::int64_t> labels;
  labels.reserve(ops.size());
  std::array<std::size_t, kDurationBuckets> buckets{};
  for (const auto& op : ops) {
    labels.push_back(op.duration_label);
    ++buckets[bucket_of(op.duration_label)];
  }
  std::sort(labels.begin(), labels.end());
  const double n = static_cast<double>(labels.size());
  stats.mean = static_cast<double>(std::accumulate(labels.begin(), labels.end(), std::int64_t{0})) / n;
  const std::size_t mid = labels.size() / 2;
  stats.median = labels.size() % 2 == 1
                     ? static_cast<double>(labels[mid])
                     : 0.5 * static_cast<double>(labels[mid - 1] + labels[mid]);
  stats.min = labels.front();
  stats.max = labels.back();
  for (std::size_t b = 0; b < kDurationBuckets; ++b) {
    stats.bucket_pct[b] = 100.0 * static_cast<double>(buckets[b]) / n;
  }
  return stats;
}

std::vector<double> default_thresholds_bp() {
  return {0, 0.5, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
}

std::vector<ThresholdRow> threshold_table(std::span<const ArbitrageOpportunity> ops,
                                          std::span<const double> thresholds_bp) {
  if (!std::is_sorted(thresholds_bp.begin(), thresholds_bp.end())) {
    throw std::invalid_argument("thresholds must be sorted ascending");
  }
  std::vector<ThresholdRow> rows;
  rows.reserve(thresholds_bp.size());
  for (const double theta : thresholds_bp) {
    if (theta < 0) throw std::invalid_argument("thresholds must be non-negative");
    ThresholdRow row{theta, 0, 0.0};
    std::int64_t label_sum = 0;
    for (const auto& op : ops) {
      const bool hit = theta == 0.0 ? op.peak_gamma > 1.0
                                    : op.magnitude_bp >= theta - kThresholdToleranceBp;
      if (hit) {
        ++row.count;
        label_sum += op.duration_label;
      }
    }
    if (row.count > 0) {
      row.mean_duration = static_cast<double>(label_sum) / static_cast<double>(row.count);
    }
    rows.push_back(row);
  }
  return rows;
}

void MomentAccumulator::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double delta = other.mean_ - mean_;
  const double total = na + nb;
  mean_ += delta * nb / total;
  m2_ += other.m2_ + delta * delta * na * nb / total;
  n_ += other.n_;
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0}) + underflow + overflow;
}

DistributionStats distribution_stats(std::span<const RateProductSeries> series, double bin_width,
                                     double lo, double hi) {
  if (!(lo < hi) || !(bin_width > 0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("histogram needs lo < hi and bin_width > 0");
  }
  const double span = (hi - lo) / bin_width;
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(span - 1e-9)));
  if (bins > 10'000'000) throw std::invalid_argument("too many histogram bins");

  DistributionStats stats;
  stats.histogram = Histogram{lo, hi, bin_width, std::vector<std::size_t>(bins, 0), 0, 0};
  MomentAccumulator moments;
  for (const RateProductSeries& s : series) {
    for (const RateProductPoint& p : s.points) {
      ++stats.points;
      if (p.gamma == 0.0) {
        ++stats.missing;
        continue;
      }
      moments.add(p.gamma);
      if (p.gamma < lo) {
        ++stats.histogram.underflow;
      } else if (p.gamma >= hi) {
        ++stats.histogram.overflow;
      } else {
        auto k = static_cast<std::size_t>(std::floor((p.gamma - lo) / bin_width));
        ++stats.histogram.counts[std::min(k, bins - 1)];
      }
    }
  }
  stats.mean = moments.mean();
  stats.stdev = std::sqrt(moments.variance());
  return stats;
}

DistributionStats distribution_stats(const RateProductSeries& series, double bin_width, double lo,
                                     double hi) {
  return distribution_stats(std::span<const RateProductSeries>(&series, 1), bin_width, lo, hi);
}

ComparisonReport compare_periods(std::span<const PeriodStats> periods) {
  if (periods.size() < 2) throw std::invalid_argument("comparison needs at least two periods");
  ComparisonReport report;
  for (const PeriodStats& p : periods) {
    report.rows.push_back({p.label, p.durations.count, p.durations.bucket_pct, p.distribution.mean,
                           p.distribution.stdev});
  }
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const ComparisonRow& a = report.rows[i - 1];
    const ComparisonRow& b = report.rows[i];
    report.deltas.push_back({a.label, b.label,
                             static_cast<std::int64_t>(b.count) - static_cast<std::int64_t>(a.count),
                             b.bucket_pct[0] - a.bucket_pct[0], b.mean - a.mean, b.stdev - a.stdev});
  }
  return report;
}

void write_opportunities_csv(std::ostream& out, std::span<const ArbitrageOpportunity> ops) {
  out << "direction,start,start_iso,run_length,duration_label,initial_gamma,peak_gamma,magnitude_bp\n";
  for (const auto& op : ops) {
    out << fmt::format("{},{},{},{},{},{:.12f},{:.12f},{:.6f}\n", direction_name(op.direction),
                       op.start, format_iso(op.start), op.run_length, op.duration_label,
                       op.initial_gamma, op.peak_gamma, op.magnitude_bp);
  }
}

nlohmann::ordered_json to_json(const DurationStats& stats) {
  nlohmann::ordered_json pct;
  for (std::size_t b = 0; b < kDurationBuckets; ++b) pct[kDurationBucketNames[b]] = stats.bucket_pct[b];
  return {{"count", stats.count},
          {"duration_s",
           {{"mean", stats.mean}, {"median", stats.median}, {"min", stats.min}, {"max", stats.max}}},
          {"percentage", pct}};
}

nlohmann::ordered_json to_json(const DistributionStats& stats) {
  return {{"points", stats.points},       {"missing", stats.missing},
          {"mean", stats.mean},           {"stdev", stats.stdev},
          {"lo", stats.histogram.lo},     {"hi", stats.histogram.hi},
          {"bin_width", stats.histogram.bin_width},
          {"underflow", stats.histogram.underflow},
          {"overflow", stats.histogram.overflow}};
}

void write_threshold_csv(std::ostream& out, std::span<const ThresholdRow> rows) {
  out << "threshold_bp,count,mean_duration\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{:.6f}\n", r.threshold_bp, r.count, r.mean_duration);
  }
}

void write_histogram_csv(std::ostream& out, const DistributionStats& stats) {
  const Histogram& h = stats.histogram;
  const std::size_t valid = stats.points - stats.missing;
  auto freq = [&](std::size_t c) { return valid > 0 ? static_cast<double>(c) / valid : 0.0; };
  out << "bin_lo,bin_hi,count,frequency\n";
  out << fmt::format("-inf,{:.8f},{},{:.10g}\n", h.lo, h.underflow, freq(h.underflow));
  for (std::size_t i = 0; i < h.counts.size(); ++i) {
    out << fmt::format("{:.8f},{:.8f},{},{:.10g}\n", h.bin_lower(i), h.bin_upper(i), h.counts[i],
                       freq(h.counts[i]));
  }
  out << fmt::format("{:.8f},inf,{},{:.10g}\n", h.hi, h.overflow, freq(h.overflow));
}

void write_comparison_csv(std::ostream& out, const ComparisonReport& report) {
  out << "label,count";
  for (const char* name : kDurationBucketNames) out << ',' << name;
  out << ",mean,stdev\n";
  for (const auto& r : report.rows) {
    out << r.label << ',' << r.count;
    for (const double pct : r.bucket_pct) out << fmt::format(",{:.4f}", pct);
    out << fmt::format(",{:.8f},{:.6e}\n", r.mean, r.stdev);
  }
}

void write_comparison_deltas_csv(std::ostream& out, const ComparisonReport& report) {
  out << "from,to,delta_count,delta_1s,delta_mean,delta_stdev\n";
  for (const auto& d : report.deltas) {
    out << fmt::format("{},{},{},{:.4f},{:.8e},{:.6e}\n", d.from, d.to, d.delta_count,
                       d.delta_pct_1s, d.delta_mean, d.delta_stdev);
  }
}

}  // namespace triarb
