#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "support.hpp"
#include "triarb/errors.hpp"
#include "triarb/simulator.hpp"

using namespace triarb;

namespace {

ArbitrageOpportunity trade(double gamma, std::int64_t run_length = 1) {
  ArbitrageOpportunity op;
  op.initial_gamma = op.peak_gamma = gamma;
  op.magnitude_bp = (gamma - 1.0) * 1e4;
  op.run_length = op.duration_label = run_length;
  return op;
}

std::vector<ArbitrageOpportunity> random_trades(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0 / 0.6);
  std::geometric_distribution<int> len(0.6);
  std::vector<ArbitrageOpportunity> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(trade(1.0 + (0.05 + e(rng)) * 1e-4, 1 + len(rng)));
  return out;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("trade selection uses the initial gamma") {
  std::vector<ArbitrageOpportunity> ops = {trade(1.00002), trade(1.00005), trade(1.0002)};
  ops[0].peak_gamma = 1.001;
  CHECK(select_trades(ops, 1.0).size() == 3);
  CHECK(select_trades(ops, 1.00005).size() == 1);
  CHECK(select_trades(ops, 1.0001).size() == 1);
  CHECK_THROWS_AS(select_trades(ops, 0.99), std::invalid_argument);
  const auto from_series = select_trades(testing::series_of({1.0002, 1.0, 1.00003}), 1.00001);
  CHECK(from_series.size() == 2);
}

TEST_CASE("config validation") {
  SimulationConfig c;
  CHECK_NOTHROW(c.validate());
  c.fill_prob = 1.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.fill_prob = -0.1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.loss_bp = -1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.runs = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.volume = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.long_min_run_length = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("fill draws are reproducible and shared across parameters") {
  CHECK(fill_draws(7, 3, 100) == fill_draws(7, 3, 100));
  CHECK(fill_draws(7, 3, 100) != fill_draws(7, 4, 100));
  const auto long_draws = fill_draws(7, 3, 200);
  const auto short_draws = fill_draws(7, 3, 100);
  CHECK(std::equal(short_draws.begin(), short_draws.end(), long_draws.begin()));
  for (const double u : long_draws) CHECK((u >= 0.0 && u < 1.0));
}

TEST_CASE("simulated outcomes follow the fill rule") {
  const auto trades = random_trades(1, 500);
  SimulationConfig c;
  c.fill_prob = 0.3;
  c.loss_bp = 2.0;
  c.volume = 1e6;
  c.seed = 11;
  const auto u = fill_draws(c.seed, 5, trades.size());
  const auto out = simulate_run(trades, c, 5);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    CHECK(out[i].filled == (u[i] < 0.3));
    const double expected = out[i].filled ? 1e6 * (trades[i].initial_gamma - 1.0) : -1e6 * 2e-4;
    CHECK(out[i].pnl == doctest::Approx(expected));
  }

  c.scenario = FillScenario::DurationFill;
  const auto dur = simulate_run(trades, c, 5);
  for (std::size_t i = 0; i < trades.size(); ++i) {
    CHECK(dur[i].filled == (trades[i].run_length >= 2 || u[i] < 0.3));
    if (!out[i].filled && !dur[i].filled) CHECK(dur[i].pnl == out[i].pnl);
  }
}

TEST_CASE("all filled total equals the closed form sum") {
  const auto trades = random_trades(2, 300);
  SimulationConfig c;
  c.fill_prob = 1.0;
  c.runs = 7;
  c.volume = 1e6;
  const SimulationResult r = run_simulation(trades, c);
  double sum = 0.0;
  for (const auto& t : trades) sum += 1e6 * (t.initial_gamma - 1.0);
  CHECK(r.total_profit == doctest::Approx(sum).epsilon(1e-12));
  CHECK(r.total_profit_std == doctest::Approx(0.0).epsilon(1e-6).scale(1.0));
  CHECK(r.trades_filled == 300.0);
  CHECK(r.trades_attempted == 300);
  const TradeStats ts = trade_stats(trades, 2);
  CHECK(r.total_profit == doctest::Approx(analytic_total_profit(FixedFillInputs{300, 1e6, 1.0, 1.5, ts.mean_excess})));
  CHECK(r.mean_profit_per_trade_bp == doctest::Approx(ts.mean_excess * 1e4));
}

TEST_CASE("zero fill probability loses lambda on every fixed-fill trade") {
  const auto trades = random_trades(3, 200);
  SimulationConfig c;
  c.fill_prob = 0.0;
  c.loss_bp = 1.5;
  c.runs = 3;
  const SimulationResult r = run_simulation(trades, c);
  CHECK(r.total_profit == doctest::Approx(-200 * 1e6 * 1.5e-4));
  CHECK(r.mean_profit_per_trade_bp == doctest::Approx(-1.5));
}

TEST_CASE("transaction fees are charged per trade leg") {
  const auto trades = random_trades(4, 50);
  SimulationConfig c;
  c.runs = 2;
  const double base = run_simulation(trades, c).total_profit;
  c.fee_per_trade = 10.0;
  const SimulationResult r = run_simulation(trades, c);
  CHECK(r.transaction_costs == doctest::Approx(3 * 10.0 * 50));
  CHECK(r.total_profit == doctest::Approx(base - 1500.0));
}

TEST_CASE("sample standard deviation over runs") {
  const auto trades = random_trades(5, 100);
  SimulationConfig c;
  c.fill_prob = 0.5;
  c.runs = 25;
  c.seed = 3;
  const SimulationResult r = run_simulation(trades, c);
  REQUIRE(r.run_totals.size() == 25);
  const double mean = std::accumulate(r.run_totals.begin(), r.run_totals.end(), 0.0) / 25.0;
  double ss = 0;
  for (const double x : r.run_totals) ss += (x - mean) * (x - mean);
  CHECK(r.total_profit == doctest::Approx(mean));
  CHECK(r.total_profit_std == doctest::Approx(std::sqrt(ss / 24.0)));
  c.runs = 1;
  CHECK(run_simulation(trades, c).total_profit_std == 0.0);
}

TEST_CASE("no trades gives zero profit") {
  SimulationConfig c;
  const SimulationResult r = run_simulation(std::vector<ArbitrageOpportunity>{}, c);
  CHECK(r.total_profit == 0.0);
  CHECK(r.mean_profit_per_trade_bp == 0.0);
}

TEST_CASE("trade statistics split by duration") {
  const std::vector<ArbitrageOpportunity> trades = {trade(1.0001, 1), trade(1.0003, 2), trade(1.0002, 5)};
  const TradeStats s = trade_stats(trades, 2);
  CHECK(s.n_total == 3);
  CHECK(s.n_long == 2);
  CHECK(s.n_short == 1);
  CHECK(s.mean_excess == doctest::Approx(2e-4));
  CHECK(s.mean_excess_long == doctest::Approx(2.5e-4));
  CHECK(s.mean_excess_short == doctest::Approx(1e-4));
  CHECK(trade_stats(trades, 6).n_long == 0);
}

TEST_CASE("closed forms") {
  CHECK(analytic_total_profit(FixedFillInputs{100, 1e6, 0.8, 1.5, 0.375e-4}) == doctest::Approx(0.0).scale(1.0));
  CHECK(analytic_total_profit(FixedFillInputs{10, 1e6, 1.0, 1.5, 1e-4}) == doctest::Approx(1000.0));
  CHECK(analytic_total_profit(FixedFillInputs{10, 1e6, 0.0, 1.5, 1e-4}) == doctest::Approx(-1500.0));
  CHECK(analytic_total_profit(DurationFillInputs{5, 10, 1e6, 0.5, 2.0, 2e-4, 1e-4}) ==
        doctest::Approx(5 * 200.0 + 10 * (0.5 * 100.0 - 0.5 * 200.0)));
  CHECK_THROWS_AS(analytic_total_profit(FixedFillInputs{10, 1e6, 1.2, 1.5, 1e-4}), std::invalid_argument);
  CHECK_THROWS_AS(analytic_total_profit(FixedFillInputs{-1, 1e6, 0.5, 1.5, 1e-4}), std::invalid_argument);

  const AnalyticBreakEven p1 = analytic_break_even(0.375e-4, 1.5);
  CHECK(p1.p == doctest::Approx(0.8).epsilon(1e-12));
  CHECK_FALSE(p1.clamped);
  CHECK(analytic_break_even(1e-4, 1.0).p == doctest::Approx(0.5));
  CHECK_THROWS_AS(analytic_break_even(1e-4, 0.0), std::invalid_argument);

  // Long trades alone cover the losses: the raw value goes negative and is clamped.
  const AnalyticBreakEven covered = analytic_break_even(10, 5e-4, 10, 1e-4, 1.0);
  CHECK(covered.p == 0.0);
  CHECK(covered.clamped);
  const AnalyticBreakEven p2 = analytic_break_even(2, 1e-4, 10, 1e-4, 2.0);
  CHECK(p2.p == doctest::Approx((1.0 - 2 * 1e-4 / (10 * 2e-4)) / (1.0 + 0.5)));
  CHECK_FALSE(p2.clamped);
  CHECK(analytic_break_even(3, 1e-4, 0, 0.0, 2.0).clamped);
}

TEST_CASE("inverting a closed form gives zero profit") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.01, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double e = u(rng) * 1e-4;
    const double lambda = u(rng);
    const AnalyticBreakEven b = analytic_break_even(e, lambda);
    CHECK(analytic_total_profit(FixedFillInputs{1000, 1e6, b.p, lambda, e}) == doctest::Approx(0.0).scale(1e3));
    const std::int64_t n_g = static_cast<std::int64_t>(rng() % 5);
    const double el = u(rng) * 1e-4, es = u(rng) * 1e-4;
    const AnalyticBreakEven b2 = analytic_break_even(n_g, el, 100, es, lambda);
    if (!b2.clamped) {
      CHECK(analytic_total_profit(DurationFillInputs{n_g, 100, 1e6, b2.p, lambda, el, es}) ==
            doctest::Approx(0.0).scale(1e3));
    }
  }
}

TEST_CASE("simulated break-even tracks the closed form") {
  const auto trades = random_trades(6, 2000);
  const std::vector<double> losses = {1.0, 1.5, 2.0};
  for (const FillScenario sc : {FillScenario::FixedFill, FillScenario::DurationFill}) {
    const BreakEvenRequest req{sc, 1.0, 200, 21, 2};
    const auto curve = break_even_curve(trades, req, losses);
    REQUIRE(curve.size() == 3);
    for (const auto& b : curve) {
      CHECK(std::abs(b.simulated_p - b.analytic_p) < 0.02);
      CHECK(b.simulated_p_std > 0.0);
    }
    CHECK(curve[0].analytic_p < curve[2].analytic_p);  // more loss needs more fills
  }
  const BreakEvenResult single = break_even(trades, BreakEvenRequest{}, 1.5);
  CHECK(single.loss_bp == 1.5);
}

TEST_CASE("break-even errors") {
  const auto trades = random_trades(7, 50);
  const std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(break_even_curve(trades, BreakEvenRequest{}, bad), std::invalid_argument);
  BreakEvenRequest high;
  high.gamma_t = 1.5;
  CHECK_THROWS_AS(break_even(trades, high, 1.5), UndefinedBreakEvenError);
}

TEST_CASE("profit surface agrees with individual simulations") {
  const auto trades = random_trades(8, 400);
  const std::vector<double> ps = {0.0, 0.25, 0.5, 0.75, 1.0};
  const std::vector<double> ls = {0.0, 1.0, 2.5};
  SimulationConfig c;
  c.runs = 20;
  c.seed = 4;
  const ProfitSurface s = profit_surface(trades, ps, ls, c);
  REQUIRE(s.mean_profit_bp.size() == 15);
  for (std::size_t ip = 0; ip < ps.size(); ++ip) {
    for (std::size_t il = 0; il < ls.size(); ++il) {
      SimulationConfig one = c;
      one.fill_prob = ps[ip];
      one.loss_bp = ls[il];
      CHECK(s.at(ip, il) == doctest::Approx(run_simulation(trades, one).mean_profit_per_trade_bp).epsilon(1e-9));
    }
  }
  // Profit rises with p and falls with lambda.
  for (std::size_t ip = 1; ip < ps.size(); ++ip) CHECK(s.at(ip, 2) >= s.at(ip - 1, 2));
  CHECK(s.at(2, 0) >= s.at(2, 2));
  REQUIRE(s.break_even_p.size() == 3);
  CHECK(s.break_even_p[0] == 0.0);
  REQUIRE(s.break_even_p[2]);
  CHECK(*s.break_even_p[2] > 0.0);

  const std::vector<double> descending = {1.0, 0.0};
  CHECK_THROWS_AS(profit_surface(trades, descending, ls, c), std::invalid_argument);
  const std::vector<double> none;
  CHECK_THROWS_AS(profit_surface(trades, none, ls, c), std::invalid_argument);
}

TEST_CASE("leg volume limits") {
  const double g = 1.2065 * 115.72 / 139.60;
  const std::vector<std::optional<double>> limits = {std::nullopt, 10e6, std::nullopt};
  const std::vector<double> rates = {1.2065, 115.72, 1.0 / 139.60};
  const VolumeLimit v = max_arb_volume(limits, rates);
  REQUIRE(v.stake);
  CHECK(*v.stake == doctest::Approx(10e6 / 1.2065));
  CHECK(v.binding_leg == 1u);
  CHECK(std::round(profit_cap(10e6, g)) == 1159.0);

  const std::vector<std::optional<double>> first = {5e6, 10e6, 1e12};
  const VolumeLimit f = max_arb_volume(first, rates);
  CHECK(*f.stake == doctest::Approx(5e6));
  CHECK(f.binding_leg == 0u);

  const std::vector<std::optional<double>> free(3);
  CHECK(max_arb_volume(free, rates).unbounded());
  const std::vector<double> bad_rates = {1.0, -1.0, 1.0};
  CHECK_THROWS_AS(max_arb_volume(limits, bad_rates), std::invalid_argument);
  const std::vector<std::optional<double>> short_limits = {1.0};
  CHECK_THROWS_AS(max_arb_volume(short_limits, rates), std::invalid_argument);
}

}  // TEST_SUITE
