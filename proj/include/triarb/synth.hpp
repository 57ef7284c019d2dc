#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "triarb/market_data.hpp"
#include "triarb/seasonal.hpp"

namespace triarb {

// Price model for one pair. The direct pair (A/C) ignores initial_mid and
// volatility: its mid is the parity product of the other two.
struct PairModel {
  int decimals = 5;
  double initial_mid = 1.0;
  double volatility = 1e-5;                // per-second log-return stdev
  std::array<double, 24> spread_points{};  // per hour of day, in points
  std::array<double, 24> gap_rate{};       // per hour, probability a second is missing
};

struct InjectionSpec {
  Timestamp start = 0;
  std::int64_t duration_seconds = 1;
  double magnitude_bp = 1.0;  // target (gamma - 1) * 1e4
  Direction direction = Direction::Dir1;

  bool operator==(const InjectionSpec&) const = default;
};

struct SynthConfig {
  std::uint64_t seed = 0;
  TriangleSpec triangle;
  SeriesWindow window;
  std::array<PairModel, 3> pairs;  // ordered as triangle.pairs
  std::vector<InjectionSpec> injections;
};

struct SynthOutput {
  std::array<PairSeries, 3> series;  // ordered as triangle.pairs
  std::vector<InjectionSpec> ground_truth;  // sorted by start
  std::vector<double> realized_magnitude_bp;  // per ground-truth entry, after rounding
};

// Largest allowed gap between an injection's realized and target magnitude.
inline constexpr double kInjectionToleranceBp = 0.05;

/// Outside injections both rate products stay below 1 at every complete
/// second; inside one, the chosen direction's gamma sits within tolerance of
/// the target for exactly duration_seconds. Throws ConfigError when an
/// injection cannot be realized.
SynthOutput generate(const SynthConfig& cfg);

struct LiquidityProfile {
  std::array<int, 24> overlap{};
  std::array<double, 24> spread_factor{};  // multiplies base spreads
  std::array<double, 24> gap_factor{};     // multiplies base gap rates
};

/// Hours with more liquid markets get proportionally narrower spreads and
/// fewer gaps: factor = 1 / (1 + overlap).
LiquidityProfile liquidity_preset(const SessionTable& table);

/// Uniform profile (factors 1, overlap 0).
LiquidityProfile flat_liquidity();

void apply_liquidity(PairModel& model, double base_spread_points, double base_gap_rate,
                     const LiquidityProfile& profile);

// Random injection schedule. In an hour with overlap k, starts occur at
// rate_per_hour * (1 + rate_gain * k) and durations are geometric with mean
// max(1, mean_duration_s / (1 + duration_gain * k)).
struct ScheduleParams {
  double rate_per_hour = 10.0;
  double rate_gain = 1.0;
  double mean_duration_s = 2.0;
  double duration_gain = 1.0;
  std::int64_t max_duration_s = 30;
  double magnitude_min_bp = 0.5;
  double magnitude_mean_bp = 1.0;  // min + exponential excess with this mean overall
  double magnitude_max_bp = 10.0;
};

std::vector<InjectionSpec> schedule_injections(const SeriesWindow& window,
                                               const ScheduleParams& params,
                                               const LiquidityProfile& profile, std::uint64_t seed);

nlohmann::ordered_json injections_to_json(const SynthOutput& out);
std::vector<InjectionSpec> injections_from_json(const nlohmann::json& j);

}  // namespace triarb
