#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "triarb/opportunity.hpp"

namespace triarb {

enum class FillScenario {
  FixedFill,     // every trade fills with probability p
  DurationFill,  // long opportunities always fill, short ones with probability p
};

std::string_view scenario_name(FillScenario s);

struct SimulationConfig {
  double gamma_t = 1.0;
  FillScenario scenario = FillScenario::FixedFill;
  double fill_prob = 1.0;
  double loss_bp = 1.5;
  double volume = 1e6;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  // Opportunities with run_length >= this count as lasting at least one
  // second (a "1s" label means under one second).
  std::int64_t long_min_run_length = 2;
  // Fee per individual trade; each transaction has three.
  double fee_per_trade = 0.0;

  void validate() const;
};

/// Opportunities whose initial gamma exceeds gamma_t, one trade each.
std::vector<ArbitrageOpportunity> select_trades(std::span<const ArbitrageOpportunity> ops,
                                                double gamma_t);
std::vector<ArbitrageOpportunity> select_trades(const RateProductSeries& series, double gamma_t);

struct TradeOutcome {
  std::size_t trade_index = 0;
  bool filled = false;
  double pnl = 0.0;
};

// Uniform draws for one run; trade i fills when draw[i] < p. The same
// draws feed every p, lambda and scenario for that (seed, run).
std::vector<double> fill_draws(std::uint64_t seed, std::size_t run, std::size_t trades);

/// Outcomes for a single run; trades should come from select_trades.
std::vector<TradeOutcome> simulate_run(std::span<const ArbitrageOpportunity> trades,
                                       const SimulationConfig& cfg, std::size_t run);

struct SimulationResult {
  double total_profit = 0.0;      // mean over runs, after transaction costs
  double total_profit_std = 0.0;  // sample standard deviation over runs
  double mean_profit_per_trade_bp = 0.0;
  std::size_t trades_attempted = 0;
  double trades_filled = 0.0;  // mean over runs
  double transaction_costs = 0.0;
  std::vector<double> run_totals;
};

SimulationResult run_simulation(std::span<const ArbitrageOpportunity> trades,
                                const SimulationConfig& cfg);
SimulationResult run_simulation(const RateProductSeries& series, const SimulationConfig& cfg);

// Empirical conditional means of (gamma - 1) over a trade set.
struct TradeStats {
  std::size_t n_total = 0;
  double mean_excess = 0.0;
  std::size_t n_long = 0;  // run_length >= long_min_run_length
  double mean_excess_long = 0.0;
  std::size_t n_short = 0;
  double mean_excess_short = 0.0;
};

TradeStats trade_stats(std::span<const ArbitrageOpportunity> trades, std::int64_t long_min_run_length);

struct FixedFillInputs {
  std::int64_t trades = 0;  // N
  double volume = 0.0;
  double fill_prob = 0.0;
  double loss_bp = 0.0;
  double mean_excess = 0.0;
};

struct DurationFillInputs {
  std::int64_t long_trades = 0;   // n_g
  std::int64_t short_trades = 0;  // n
  double volume = 0.0;
  double fill_prob = 0.0;
  double loss_bp = 0.0;
  double mean_excess_long = 0.0;
  double mean_excess_short = 0.0;
};

/// T1 = N V (p <e> - (1 - p) lambda)
double analytic_total_profit(const FixedFillInputs& in);
/// T2 = n_g V <e|long> + n V (p <e|short> - (1 - p) lambda)
double analytic_total_profit(const DurationFillInputs& in);

struct AnalyticBreakEven {
  double p = 0.0;
  bool clamped = false;  // raw value fell outside [0, 1]
};

/// p1 = (1 + <e> / lambda)^-1
AnalyticBreakEven analytic_break_even(double mean_excess, double loss_bp);
/// p2 = (1 - n_g <e|long> / (n lambda)) (1 + <e|short> / lambda)^-1, clamped to [0, 1].
AnalyticBreakEven analytic_break_even(std::int64_t long_trades, double mean_excess_long,
                                      std::int64_t short_trades, double mean_excess_short,
                                      double loss_bp);

struct BreakEvenResult {
  double loss_bp = 0.0;
  double analytic_p = 0.0;
  bool analytic_clamped = false;
  double simulated_p = 0.0;
  double simulated_p_std = 0.0;
};

struct BreakEvenRequest {
  FillScenario scenario = FillScenario::FixedFill;
  double gamma_t = 1.0;
  std::size_t runs = 100;
  std::uint64_t seed = 0;
  std::int64_t long_min_run_length = 2;
};

/// Simulated values locate, per run, the zero crossing of total profit over
/// 101 evenly spaced fill probabilities with linear interpolation.
BreakEvenResult break_even(std::span<const ArbitrageOpportunity> ops, const BreakEvenRequest& req,
                           double loss_bp);
BreakEvenResult break_even(const RateProductSeries& series, const BreakEvenRequest& req,
                           double loss_bp);
std::vector<BreakEvenResult> break_even_curve(std::span<const ArbitrageOpportunity> ops,
                                              const BreakEvenRequest& req,
                                              std::span<const double> losses_bp);

struct ProfitSurface {
  std::vector<double> p_grid;
  std::vector<double> lambda_grid_bp;
  std::vector<double> mean_profit_bp;  // p-major: [ip * lambdas + il]
  // Per lambda, the interpolated p where mean profit crosses zero.
  std::vector<std::optional<double>> break_even_p;

  double at(std::size_t ip, std::size_t il) const {
    return mean_profit_bp[ip * lambda_grid_bp.size() + il];
  }
};

/// Mean profit per trade (bp) over cfg.runs per (p, lambda) cell; cfg.fill_prob
/// and cfg.loss_bp are ignored.
ProfitSurface profit_surface(std::span<const ArbitrageOpportunity> ops,
                             std::span<const double> p_grid, std::span<const double> lambda_grid_bp,
                             const SimulationConfig& cfg);
ProfitSurface profit_surface(const RateProductSeries& series, std::span<const double> p_grid,
                             std::span<const double> lambda_grid_bp, const SimulationConfig& cfg);

struct VolumeLimit {
  std::optional<double> stake;  // in the initial currency; empty when unbounded
  std::optional<std::size_t> binding_leg;

  bool unbounded() const { return !stake.has_value(); }
};

/// leg_limits[i] caps the amount, in the currency sold on leg i, that can be
/// converted at the arbitrage price (nullopt = unconstrained). rates[i] is
/// the effective conversion rate of leg i.
VolumeLimit max_arb_volume(std::span<const std::optional<double>> leg_limits,
                           std::span<const double> rates);

inline double profit_cap(double stake, double gamma) { return stake * (gamma - 1.0); }

}  // namespace triarb
