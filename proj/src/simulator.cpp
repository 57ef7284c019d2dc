#include "triarb/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "triarb/errors.hpp"
#include "triarb/rng.hpp"

namespace triarb {

namespace {

constexpr double kBp = 1e-4;
constexpr std::size_t kBreakEvenGridSteps = 100;  // 101 points on [0, 1]

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("{} must lie in [0, 1]", what));
}

struct RunSummary {
  double mean = 0.0;
  double stdev = 0.0;
};

// Sample standard deviation; zero for a single run.
RunSummary summarize(std::span<const double> xs) {
  RunSummary s;
  if (xs.empty()) return s;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  s.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.stdev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return s;
}

bool always_fills(const ArbitrageOpportunity& op, FillScenario scenario, std::int64_t long_min) {
  return scenario == FillScenario::DurationFill && op.run_length >= long_min;
}

// First index with value >= 0 along an ascending grid, linearly interpolated.
std::optional<double> zero_crossing(std::span<const double> grid, std::span<const double> values) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k] >= 0.0) {
      if (k == 0) return grid[0];
      const double t = -values[k - 1] / (values[k] - values[k - 1]);
      return grid[k - 1] + t * (grid[k] - grid[k - 1]);
    }
  }
  return std::nullopt;
}

// Smallest k with u < k / steps.
std::size_t fill_bucket(double u, std::size_t steps) {
  const double s = static_cast<double>(steps);
  auto k = static_cast<std::size_t>(std::floor(u * s)) + 1;
  while (k > 1 && u < static_cast<double>(k - 1) / s) --k;
  while (k <= steps && !(u < static_cast<double>(k) / s)) ++k;
  return k;
}

}  // namespace

std::string_view scenario_name(FillScenario s) {
  return s == FillScenario::FixedFill ? "fixed" : "duration";
}

void SimulationConfig::validate() const {
  if (!(gamma_t >= 1.0)) throw std::invalid_argument("gamma_t must be >= 1");
  require_probability(fill_prob, "fill probability");
  if (!(loss_bp >= 0.0)) throw std::invalid_argument("loss (lambda) must be >= 0 bp");
  if (!(volume > 0.0)) throw std::invalid_argument("volume must be positive");
  if (runs == 0) throw std::invalid_argument("runs must be >= 1");
  if (long_min_run_length < 1) throw std::invalid_argument("long_min_run_length must be >= 1");
  if (!(fee_per_trade >= 0.0)) throw std::invalid_argument("fee must be >= 0");
}

std::vector<ArbitrageOpportunity> select_trades(std::span<const ArbitrageOpportunity> ops,
                                                double gamma_t) {
  if (!(gamma_t >= 1.0)) throw std::invalid_argument("gamma_t must be >= 1");
  std::vector<ArbitrageOpportunity> trades;
  for (const auto& op : ops) {
    if (op.initial_gamma > gamma_t) trades.push_back(op);
  }
  return trades;
}

std::vector<ArbitrageOpportunity> select_trades(const RateProductSeries& series, double gamma_t) {
  return select_trades(segment_opportunities(series), gamma_t);
}

std::vector<double> fill_draws(std::uint64_t seed, std::size_t run, std::size_t trades) {
  std::mt19937_64 rng(derive_seed(seed, run));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<double> u(trades);
  for (double& x : u) x = uniform(rng);
  return u;
}

std::vector<TradeOutcome> simulate_run(std::span<const ArbitrageOpportunity> trades,
                                       const SimulationConfig& cfg, std::size_t run) {
  cfg.validate();
  const std::vector<double> u = fill_draws(cfg.seed, run, trades.size());
  const double loss = cfg.volume * cfg.loss_bp * kBp;
  std::vector<TradeOutcome> out(trades.size());
  for (std::size_t i = 0; i < trades.size(); ++i) {
    const bool filled =
        always_fills(trades[i], cfg.scenario, cfg.long_min_run_length) || u[i] < cfg.fill_prob;
    out[i] = {i, filled, filled ? cfg.volume * (trades[i].initial_gamma - 1.0) : -loss};
  }
  return out;
}

SimulationResult run_simulation(std::span<const ArbitrageOpportunity> trades,
                                const SimulationConfig& cfg) {
  cfg.validate();
  SimulationResult result;
  result.trades_attempted = trades.size();
  result.transaction_costs = 3.0 * cfg.fee_per_trade * static_cast<double>(trades.size());
  result.run_totals.resize(cfg.runs);
  double filled_sum = 0.0;
  for (std::size_t r = 0; r < cfg.runs; ++r) {
    double total = 0.0;
    std::size_t filled = 0;
    for (const TradeOutcome& o : simulate_run(trades, cfg, r)) {
      total += o.pnl;
      filled += o.filled ? 1 : 0;
    }
    result.run_totals[r] = total - result.transaction_costs;
    filled_sum += static_cast<double>(filled);
  }
  const RunSummary s = summarize(result.run_totals);
  result.total_profit = s.mean;
  result.total_profit_std = s.stdev;
  result.trades_filled = filled_sum / static_cast<double>(cfg.runs);
  if (!trades.empty()) {
    result.mean_profit_per_trade_bp =
        s.mean / (static_cast<double>(trades.size()) * cfg.volume) / kBp;
  }
  return result;
}

SimulationResult run_simulation(const RateProductSeries& series, const SimulationConfig& cfg) {
  cfg.validate();
  return run_simulation(select_trades(series, cfg.gamma_t), cfg);
}

TradeStats trade_stats(std::span<const ArbitrageOpportunity> trades, std::int64_t long_min_run_length) {
  TradeStats s;
  double sum = 0.0, sum_long = 0.0, sum_short = 0.0;
  for (const auto& op : trades) {
    const double e = op.initial_gamma - 1.0;
    ++s.n_total;
    sum += e;
    if (op.run_length >= long_min_run_length) {
      ++s.n_long;
      sum_long += e;
    } else {
      ++s.n_short;
      sum_short += e;
    }
  }
  if (s.n_total > 0) s.mean_excess = sum / static_cast<double>(s.n_total);
  if (s.n_long > 0) s.mean_excess_long = sum_long / static_cast<double>(s.n_long);
  if (s.n_short > 0) s.mean_excess_short = sum_short / static_cast<double>(s.n_short);
  return s;
}

double analytic_total_profit(const FixedFillInputs& in) {
  if (in.trades < 0) throw std::invalid_argument("trade count must be >= 0");
  require_probability(in.fill_prob, "fill probability");
  const double lambda = in.loss_bp * kBp;
  return static_cast<double>(in.trades) * in.volume *
         (in.fill_prob * in.mean_excess - (1.0 - in.fill_prob) * lambda);
}

double analytic_total_profit(const DurationFillInputs& in) {
  if (in.long_trades < 0 || in.short_trades < 0) throw std::invalid_argument("trade counts must be >= 0");
  require_probability(in.fill_prob, "fill probability");
  const double lambda = in.loss_bp * kBp;
  return static_cast<double>(in.long_trades) * in.volume * in.mean_excess_long +
         static_cast<double>(in.short_trades) * in.volume *
             (in.fill_prob * in.mean_excess_short - (1.0 - in.fill_prob) * lambda);
}

AnalyticBreakEven analytic_break_even(double mean_excess, double loss_bp) {
  if (!(loss_bp > 0.0)) throw std::invalid_argument("break-even needs lambda > 0");
  const double p = 1.0 / (1.0 + mean_excess / (loss_bp * kBp));
  const double clamped = std::clamp(p, 0.0, 1.0);
  return {clamped, clamped != p};
}

AnalyticBreakEven analytic_break_even(std::int64_t long_trades, double mean_excess_long,
                                      std::int64_t short_trades, double mean_excess_short,
                                      double loss_bp) {
  if (!(loss_bp > 0.0)) throw std::invalid_argument("break-even needs lambda > 0");
  if (long_trades < 0 || short_trades < 0) throw std::invalid_argument("trade counts must be >= 0");
  // No short trades: long profits are certain and p never matters.
  if (short_trades == 0) return {0.0, true};
  const double lambda = loss_bp * kBp;
  const double cover = static_cast<double>(long_trades) * mean_excess_long /
                       (static_cast<double>(short_trades) * lambda);
  const double p = (1.0 - cover) / (1.0 + mean_excess_short / lambda);
  const double clamped = std::clamp(p, 0.0, 1.0);
  return {clamped, clamped != p};
}

std::vector<BreakEvenResult> break_even_curve(std::span<const ArbitrageOpportunity> ops,
                                              const BreakEvenRequest& req,
                                              std::span<const double> losses_bp) {
  if (req.runs == 0) throw std::invalid_argument("runs must be >= 1");
  for (const double l : losses_bp) {
    if (!(l > 0.0)) throw std::invalid_argument("break-even needs lambda > 0");
  }
  const std::vector<ArbitrageOpportunity> trades = select_trades(ops, req.gamma_t);
  if (trades.empty()) {
    throw UndefinedBreakEvenError(
        fmt::format("no opportunities with initial gamma above {}", req.gamma_t));
  }
  const TradeStats stats = trade_stats(trades, req.long_min_run_length);

  std::vector<BreakEvenResult> results;
  for (const double l : losses_bp) {
    BreakEvenResult r;
    r.loss_bp = l;
    const AnalyticBreakEven a =
        req.scenario == FillScenario::FixedFill
            ? analytic_break_even(stats.mean_excess, l)
            : analytic_break_even(static_cast<std::int64_t>(stats.n_long), stats.mean_excess_long,
                                  static_cast<std::int64_t>(stats.n_short), stats.mean_excess_short, l);
    r.analytic_p = a.p;
    r.analytic_clamped = a.clamped;
    results.push_back(r);
  }

  // Per unit volume: total(p_k) = certain + S_k - lambda * (n_random - F_k),
  // where S_k, F_k sum the random trades with draw < p_k.
  constexpr std::size_t steps = kBreakEvenGridSteps;
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = static_cast<double>(k) / steps;

  std::vector<std::vector<double>> per_run(losses_bp.size(), std::vector<double>(req.runs));
  std::vector<double> bucket_excess(steps + 2);
  std::vector<std::size_t> bucket_count(steps + 2);
  std::vector<double> totals(steps + 1);
  for (std::size_t run = 0; run < req.runs; ++run) {
    const std::vector<double> u = fill_draws(req.seed, run, trades.size());
    std::fill(bucket_excess.begin(), bucket_excess.end(), 0.0);
    std::fill(bucket_count.begin(), bucket_count.end(), 0);
    double certain = 0.0;
    std::size_t n_random = 0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
      const double e = trades[i].initial_gamma - 1.0;
      if (always_fills(trades[i], req.scenario, req.long_min_run_length)) {
        certain += e;
        continue;
      }
      ++n_random;
      const std::size_t k = fill_bucket(u[i], steps);
      bucket_excess[k] += e;
      ++bucket_count[k];
    }
    for (std::size_t li = 0; li < losses_bp.size(); ++li) {
      const double lambda = losses_bp[li] * kBp;
      double s = 0.0;
      std::size_t f = 0;
      for (std::size_t k = 0; k <= steps; ++k) {
        s += bucket_excess[k];
        f += bucket_count[k];
        totals[k] = certain + s - lambda * static_cast<double>(n_random - f);
      }
      // A crossing always exists: at p = 1 every trade earns gamma - 1 > 0.
      per_run[li][run] = zero_crossing(grid, totals).value_or(1.0);
    }
  }
  for (std::size_t li = 0; li < losses_bp.size(); ++li) {
    const RunSummary s = summarize(per_run[li]);
    results[li].simulated_p = s.mean;
    results[li].simulated_p_std = s.stdev;
  }
  return results;
}

BreakEvenResult break_even(std::span<const ArbitrageOpportunity> ops, const BreakEvenRequest& req,
                           double loss_bp) {
  return break_even_curve(ops, req, std::span<const double>(&loss_bp, 1)).front();
}

BreakEvenResult break_even(const RateProductSeries& series, const BreakEvenRequest& req,
                           double loss_bp) {
  return break_even(segment_opportunities(series), req, loss_bp);
}

ProfitSurface profit_surface(std::span<const ArbitrageOpportunity> ops,
                             std::span<const double> p_grid, std::span<const double> lambda_grid_bp,
                             const SimulationConfig& cfg) {
  if (p_grid.empty() || lambda_grid_bp.empty()) throw std::invalid_argument("surface grids must be non-empty");
  if (!std::is_sorted(p_grid.begin(), p_grid.end())) throw std::invalid_argument("p grid must be ascending");
  for (const double p : p_grid) require_probability(p, "p grid value");
  for (const double l : lambda_grid_bp) {
    if (!(l >= 0.0)) throw std::invalid_argument("lambda grid values must be >= 0");
  }
  SimulationConfig base = cfg;
  base.fill_prob = p_grid.front();
  base.loss_bp = lambda_grid_bp.front();
  base.validate();

  const std::vector<ArbitrageOpportunity> trades = select_trades(ops, cfg.gamma_t);
  ProfitSurface surface;
  surface.p_grid.assign(p_grid.begin(), p_grid.end());
  surface.lambda_grid_bp.assign(lambda_grid_bp.begin(), lambda_grid_bp.end());
  surface.mean_profit_bp.assign(p_grid.size() * lambda_grid_bp.size(), 0.0);
  if (!trades.empty()) {
    const double n = static_cast<double>(trades.size());
    for (std::size_t run = 0; run < cfg.runs; ++run) {
      const std::vector<double> u = fill_draws(cfg.seed, run, trades.size());
      for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
        double earned = 0.0;
        std::size_t unfilled = 0;
        for (std::size_t i = 0; i < trades.size(); ++i) {
          if (always_fills(trades[i], cfg.scenario, cfg.long_min_run_length) || u[i] < p_grid[ip]) {
            earned += trades[i].initial_gamma - 1.0;
          } else {
            ++unfilled;
          }
        }
        for (std::size_t il = 0; il < lambda_grid_bp.size(); ++il) {
          const double per_trade =
              (earned - lambda_grid_bp[il] * kBp * static_cast<double>(unfilled)) / n;
          surface.mean_profit_bp[ip * lambda_grid_bp.size() + il] += per_trade / kBp;
        }
      }
    }
    for (double& v : surface.mean_profit_bp) v /= static_cast<double>(cfg.runs);
  }
  std::vector<double> column(p_grid.size());
  for (std::size_t il = 0; il < lambda_grid_bp.size(); ++il) {
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip) column[ip] = surface.at(ip, il);
    surface.break_even_p.push_back(trades.empty() ? std::nullopt : zero_crossing(p_grid, column));
  }
  return surface;
}

ProfitSurface profit_surface(const RateProductSeries& series, std::span<const double> p_grid,
                             std::span<const double> lambda_grid_bp, const SimulationConfig& cfg) {
  return profit_surface(segment_opportunities(series), p_grid, lambda_grid_bp, cfg);
}

VolumeLimit max_arb_volume(std::span<const std::optional<double>> leg_limits,
                           std::span<const double> rates) {
  if (leg_limits.empty() || leg_limits.size() != rates.size()) {
    throw std::invalid_argument("need one limit and one rate per leg");
  }
  VolumeLimit result;
  double per_unit_stake = 1.0;  // amount entering leg i per unit of initial currency
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (!(rates[i] > 0.0) || !std::isfinite(rates[i])) throw std::invalid_argument("leg rates must be positive");
    if (leg_limits[i]) {
      if (!(*leg_limits[i] > 0.0)) throw std::invalid_argument("leg limits must be positive");
      const double stake = *leg_limits[i] / per_unit_stake;
      if (!result.stake || stake < *result.stake) {
        result.stake = stake;
        result.binding_leg = i;
      }
    }
    per_unit_stake *= rates[i];
  }
  return result;
}

}  // namespace triarb
