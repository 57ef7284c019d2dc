#pragma once

// Shared fixtures and reference implementations for the test binaries.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "triarb/market_data.hpp"
#include "triarb/opportunity.hpp"
#include "triarb/rate_product.hpp"
#include "triarb/synth.hpp"

namespace testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = fs::temp_directory_path() /
            ("triarb_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::vector<std::string> read_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// EUR/USD, USD/JPY, EUR/JPY: direction 1 is EUR->USD->JPY->EUR.
inline triarb::TriangleSpec eur_usd_jpy() {
  return triarb::TriangleSpec::make({"EUR", "USD", "JPY"},
                                    {triarb::CurrencyPair{"EUR", "USD"}, triarb::CurrencyPair{"USD", "JPY"},
                                     triarb::CurrencyPair{"EUR", "JPY"}});
}

inline triarb::RateProductSeries series_of(const std::vector<double>& gammas, triarb::Timestamp start = 0,
                                           triarb::Direction d = triarb::Direction::Dir1) {
  triarb::RateProductSeries s{d, {}};
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    s.points.push_back({start + static_cast<triarb::Timestamp>(i), gammas[i]});
  }
  return s;
}

// Reference segmentation: mark every point that opens a run, then walk to
// the end of each marked run.
inline std::vector<triarb::ArbitrageOpportunity> brute_force_segments(const triarb::RateProductSeries& s) {
  const auto& p = s.points;
  const std::size_t n = p.size();
  std::vector<bool> positive(n);
  for (std::size_t i = 0; i < n; ++i) positive[i] = p[i].gamma > 1.0;
  std::vector<triarb::ArbitrageOpportunity> out;
  for (std::size_t i = 0; i < n; ++i) {
    const bool opens = positive[i] && (i == 0 || !positive[i - 1] || p[i].timestamp - p[i - 1].timestamp != 1);
    if (!opens) continue;
    std::size_t end = i;
    while (end + 1 < n && positive[end + 1] && p[end + 1].timestamp - p[end].timestamp == 1) ++end;
    double peak = 0.0;
    for (std::size_t k = i; k <= end; ++k) peak = std::max(peak, p[k].gamma);
    triarb::ArbitrageOpportunity op;
    op.direction = s.direction;
    op.start = p[i].timestamp;
    op.start_index = i;
    op.run_length = static_cast<std::int64_t>(end - i + 1);
    op.duration_label = op.run_length;
    op.initial_gamma = p[i].gamma;
    op.peak_gamma = peak;
    op.magnitude_bp = (peak - 1.0) * 1e4;
    out.push_back(op);
  }
  return out;
}

// Fractional-pip point sizes, so injected magnitudes can be hit closely.
inline triarb::SynthConfig synth_config(std::uint64_t seed, const triarb::SeriesWindow& window,
                                        const triarb::LiquidityProfile& profile, double gap_rate = 0.0) {
  triarb::SynthConfig cfg;
  cfg.seed = seed;
  cfg.triangle = eur_usd_jpy();
  cfg.window = window;
  triarb::PairModel eurusd{5, 1.2065, 2e-5, {}, {}};
  triarb::PairModel usdjpy{3, 115.72, 2e-5, {}, {}};
  triarb::PairModel eurjpy{3, 0.0, 0.0, {}, {}};
  triarb::apply_liquidity(eurusd, 10.0, gap_rate, profile);
  triarb::apply_liquidity(usdjpy, 10.0, gap_rate, profile);
  triarb::apply_liquidity(eurjpy, 12.0, gap_rate, profile);
  cfg.pairs = {eurusd, usdjpy, eurjpy};
  return cfg;
}

// Detection on generated series, both directions, ordered by start.
inline std::vector<triarb::ArbitrageOpportunity> detect_all(const triarb::SynthOutput& out,
                                                            const triarb::TriangleSpec& tri) {
  const triarb::AlignedTriangle at = triarb::align_triangle(out.series[0], out.series[1], out.series[2], tri);
  const auto [d1, d2] = triarb::compute_rate_products(at, tri);
  auto ops = triarb::segment_opportunities(d1);
  const auto ops2 = triarb::segment_opportunities(d2);
  ops.insert(ops.end(), ops2.begin(), ops2.end());
  std::sort(ops.begin(), ops.end(), [](const auto& a, const auto& b) {
    return a.start != b.start ? a.start < b.start : a.direction < b.direction;
  });
  return ops;
}

}  // namespace testing
