#include "triarb/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "triarb/config.hpp"
#include "triarb/errors.hpp"
#include "triarb/opportunity.hpp"
#include "triarb/rate_product.hpp"
#include "triarb/simulator.hpp"
#include "triarb/synth.hpp"

namespace triarb {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

static std::optional<std::set<Weekday>> parse_weekdays(std::string_view text) {
  text = trim_view(text);
  if (text.empty() || text == "all") return std::nullopt;
  std::set<Weekday> days;
  if (text == "weekdays") {
    for (int d = 1; d <= 5; ++d) days.insert(static_cast<Weekday>(d));
    return days;
  }
  for (const std::string& item : split(text, ',')) {
    const auto d = parse_weekday(item);
    if (!d) throw std::invalid_argument(fmt::format("unknown weekday '{}'", item));
    days.insert(*d);
  }
  return days;
}

SeriesWindow parse_window(std::string_view text, std::optional<std::string_view> weekdays) {
  const std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 2) throw std::invalid_argument(fmt::format("window '{}' must be START,END", text));
  SeriesWindow w;
  w.start = parse_timestamp(parts[0]);
  w.end = parse_timestamp(parts[1]);
  if (weekdays) w.weekdays = parse_weekdays(*weekdays);
  w.validate();
  return w;
}

std::vector<double> parse_grid(std::string_view text) {
  if (text.find(':') == std::string_view::npos) return parse_double_list(text, "grid");
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) throw std::invalid_argument(fmt::format("grid '{}' must be LO:HI:COUNT", text));
  const double lo = parse_double(parts[0], "grid start");
  const double hi = parse_double(parts[1], "grid end");
  const double count = parse_double(parts[2], "grid count");
  if (!(count >= 1.0) || count != std::floor(count)) {
    throw std::invalid_argument(fmt::format("grid '{}': count must be a positive integer", text));
  }
  const auto n = static_cast<std::size_t>(count);
  if (n == 1) return {lo};
  if (!(hi > lo)) throw std::invalid_argument(fmt::format("grid '{}': HI must exceed LO", text));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

Dataset load_dataset(const fs::path& config_path, const DatasetOverrides& overrides) {
  const KeyValueConfig kv = KeyValueConfig::load(config_path);
  const fs::path base = config_path.parent_path();
  Dataset ds;
  ds.config_path = config_path;

  const std::optional<std::string> tri_text = overrides.triangle ? overrides.triangle : kv.get("triangle");
  if (!tri_text) throw ConfigError(config_path.string() + ": missing 'triangle'");
  const std::vector<std::string> ccy = split(*tri_text, ',');
  if (ccy.size() != 3) throw ConfigError(fmt::format("triangle '{}' must name three currencies", *tri_text));

  const auto pair_entries = kv.get_all("pair");
  if (pair_entries.size() != 3) {
    throw ConfigError(fmt::format("{}: expected 3 'pair' entries, found {}", config_path.string(),
                                  pair_entries.size()));
  }
  std::array<CurrencyPair, 3> pairs;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::vector<std::string> f = split(pair_entries[i].value, ',');
    if (f.size() < 2 || f.size() > 3) {
      throw ParseError("pair must be NAME,DECIMALS[,FILE]", pair_entries[i].line);
    }
    try {
      pairs[i] = CurrencyPair::parse(f[0]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), pair_entries[i].line);
    }
    int decimals = 0;
    const auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), decimals);
    if (ec != std::errc{} || ptr != f[1].data() + f[1].size()) {
      throw ParseError(fmt::format("bad decimals '{}'", f[1]), pair_entries[i].line);
    }
    ds.pairs[i] = {pairs[i], decimals};
    const fs::path file = f.size() == 3 ? fs::path(f[2]) : fs::path(pairs[i].compact() + ".csv");
    ds.files[i] = file.is_absolute() ? file : base / file;
  }
  ds.triangle = TriangleSpec::make({ccy[0], ccy[1], ccy[2]}, pairs);

  const std::optional<std::string> window_text = overrides.window ? overrides.window : kv.get("window");
  if (!window_text) throw ConfigError(config_path.string() + ": missing 'window'");
  const std::optional<std::string> weekdays = kv.get("weekdays");
  ds.window = parse_window(*window_text, weekdays ? std::optional<std::string_view>(*weekdays) : std::nullopt);

  bool any_session = false;
  for (const auto& e : kv.entries()) {
    if (e.key.rfind("session.", 0) != 0) continue;
    try {
      ds.sessions.set(e.key.substr(8), parse_hour_set(e.value));
    } catch (const std::invalid_argument& err) {
      throw ParseError(err.what(), e.line);
    }
    any_session = true;
  }
  if (!any_session) ds.sessions = SessionTable::defaults();
  return ds;
}

namespace {

struct Common {
  std::string config;
  std::string out_dir = ".";
  std::string seed;
  std::string window;
  std::string triangle;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, fmt::format("configuration file (default: ${})", kConfigEnvVar));
  cmd->add_option("--out-dir", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "random seed (unsigned 64-bit)");
  cmd->add_option("--window", c.window, "START,END in epoch seconds or ISO-8601; END is exclusive");
  cmd->add_option("--triangle", c.triangle, "currencies A,B,C");
}

fs::path config_path(const Common& c) {
  if (!c.config.empty()) return c.config;
  if (const char* env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') return env;
  throw std::invalid_argument(fmt::format("no configuration: pass --config or set {}", kConfigEnvVar));
}

DatasetOverrides overrides_of(const Common& c) {
  DatasetOverrides o;
  if (!c.window.empty()) o.window = c.window;
  if (!c.triangle.empty()) o.triangle = c.triangle;
  return o;
}

std::optional<std::uint64_t> parse_seed(std::string_view text) {
  text = trim_view(text);
  if (text.empty()) return std::nullopt;
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw std::invalid_argument(fmt::format("seed '{}' is not an unsigned integer", text));
  }
  return v;
}

// The resolved seed and whether it had to be generated.
std::pair<std::uint64_t, bool> resolve_seed(const Common& c, std::optional<std::uint64_t> from_config) {
  if (const auto s = parse_seed(c.seed)) return {*s, false};
  if (from_config) return {*from_config, false};
  std::random_device rd;
  return {(static_cast<std::uint64_t>(rd()) << 32) ^ rd(), true};
}

void warn(const std::string& msg) { std::cerr << "triarb: warning: " << msg << '\n'; }

fs::path prepare_out_dir(const Common& c) {
  const fs::path dir = c.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
  return dir;
}

template <typename F>
void write_file(const fs::path& path, F&& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const ojson& j) {
  write_file(path, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
}

ojson window_json(const SeriesWindow& w) {
  ojson j{{"start", w.start}, {"end", w.end}, {"start_iso", format_iso(w.start)}, {"end_iso", format_iso(w.end)}};
  if (w.weekdays) {
    ojson days = ojson::array();
    for (const Weekday d : *w.weekdays) days.push_back(weekday_name(d));
    j["weekdays"] = days;
  } else {
    j["weekdays"] = nullptr;
  }
  return j;
}

ojson triangle_json(const TriangleSpec& t, const std::array<PairSpec, 3>& pairs) {
  ojson ps = ojson::array();
  for (const PairSpec& p : pairs) ps.push_back({{"pair", p.pair.name()}, {"decimals", p.decimals}});
  return {{"currencies", t.currencies}, {"pairs", ps}, {"dir1", t.describe(Direction::Dir1)},
          {"dir2", t.describe(Direction::Dir2)}};
}

// Everything needed to reproduce an invocation. No wall-clock fields, so
// identical inputs give an identical manifest.
ojson manifest(const std::string& command, const std::vector<std::string>& args, const Common& c,
               std::optional<std::uint64_t> seed) {
  std::vector<std::string> argv = args;
  if (seed && parse_seed(c.seed) == std::nullopt) {
    argv.push_back("--seed");
    argv.push_back(std::to_string(*seed));
  }
  ojson j{{"tool", "triarb"}, {"version", kToolVersion}, {"command", command}};
  j["config"] = c.config.empty() ? ojson(nullptr) : ojson(c.config);
  j["out_dir"] = c.out_dir;
  j["seed"] = seed ? ojson(*seed) : ojson(nullptr);
  j["arguments"] = argv;
  return j;
}

struct Analysis {
  RateProductSeries dir1;
  RateProductSeries dir2;
  std::vector<ArbitrageOpportunity> ops;  // both directions, by start then direction
};

Analysis analyze(const Dataset& ds) {
  auto grid = std::make_shared<const TimeGrid>(ds.window);
  std::array<std::future<PairSeries>, 3> jobs;
  for (std::size_t i = 0; i < 3; ++i) {
    jobs[i] = std::async(std::launch::async, [&ds, grid, i] {
      try {
        return load_pair_series(ds.files[i], ds.pairs[i], grid);
      } catch (const EmptySeriesError& e) {
        warn(e.what());
        return PairSeries(ds.pairs[i], grid, std::vector<GridSlot>(grid->size()));
      }
    });
  }
  // Drain every job before rethrowing so no task outlives `ds`.
  std::vector<PairSeries> series;
  std::exception_ptr failure;
  for (auto& job : jobs) {
    try {
      series.push_back(job.get());
    } catch (...) {
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  for (const PairSeries& s : series) {
    for (const std::string& w : s.warnings()) warn(s.pair().name() + ": " + w);
  }

  const AlignedTriangle aligned = align_triangle(series[0], series[1], series[2], ds.triangle);
  auto [d1, d2] = compute_rate_products(aligned, ds.triangle);
  Analysis a{std::move(d1), std::move(d2), {}};
  a.ops = segment_opportunities(a.dir1);
  const auto ops2 = segment_opportunities(a.dir2);
  a.ops.insert(a.ops.end(), ops2.begin(), ops2.end());
  std::stable_sort(a.ops.begin(), a.ops.end(), [](const ArbitrageOpportunity& x, const ArbitrageOpportunity& y) {
    return x.start != y.start ? x.start < y.start : x.direction < y.direction;
  });
  return a;
}

std::vector<ArbitrageOpportunity> of_direction(const std::vector<ArbitrageOpportunity>& ops, Direction d) {
  std::vector<ArbitrageOpportunity> out;
  for (const auto& op : ops) {
    if (op.direction == d) out.push_back(op);
  }
  return out;
}

struct HistogramOptions {
  double bin_width = 1e-5;
  std::string range = "0.999,1.001";

  std::pair<double, double> bounds() const {
    const std::vector<double> r = parse_double_list(range, "histogram range");
    if (r.size() != 2) throw std::invalid_argument("histogram range must be LO,HI");
    return {r[0], r[1]};
  }
};

void add_histogram_options(CLI::App* cmd, HistogramOptions& h) {
  cmd->add_option("--bin-width", h.bin_width, "rate product histogram bin width")->capture_default_str();
  cmd->add_option("--hist-range", h.range, "rate product histogram range LO,HI")->capture_default_str();
}

DistributionStats pooled_distribution(const Analysis& a, const HistogramOptions& h) {
  const auto [lo, hi] = h.bounds();
  const std::array<RateProductSeries, 2> both = {a.dir1, a.dir2};
  return distribution_stats(std::span<const RateProductSeries>(both), h.bin_width, lo, hi);
}

// ---------------------------------------------------------------- detect

struct DetectOptions {
  Common common;
  std::string thresholds;
  HistogramOptions histogram;
  bool dump_gamma = false;
};

int cmd_detect(const DetectOptions& o, const std::vector<std::string>& args) {
  const fs::path cfg = config_path(o.common);
  const Dataset ds = load_dataset(cfg, overrides_of(o.common));
  const std::vector<double> thresholds =
      o.thresholds.empty() ? default_thresholds_bp() : parse_double_list(o.thresholds, "thresholds");
  const Analysis a = analyze(ds);
  const fs::path dir = prepare_out_dir(o.common);

  write_file(dir / "opportunities.csv", [&](std::ostream& out) { write_opportunities_csv(out, a.ops); });

  ojson stats = to_json(duration_stats(a.ops));
  ojson by_dir;
  for (const Direction d : {Direction::Dir1, Direction::Dir2}) {
    ojson entry = to_json(duration_stats(of_direction(a.ops, d)));
    entry["transaction"] = ds.triangle.describe(d);
    by_dir[std::string(direction_name(d))] = entry;
  }
  stats["by_direction"] = by_dir;
  write_json(dir / "duration_stats.json", stats);

  const auto rows = threshold_table(a.ops, thresholds);
  write_file(dir / "threshold_table.csv", [&](std::ostream& out) { write_threshold_csv(out, rows); });

  const DistributionStats dist = pooled_distribution(a, o.histogram);
  write_file(dir / "histogram.csv", [&](std::ostream& out) { write_histogram_csv(out, dist); });
  write_json(dir / "distribution.json", to_json(dist));

  if (o.dump_gamma) {
    write_file(dir / "gamma_dir1.csv", [&](std::ostream& out) { write_rate_product_csv(out, a.dir1); });
    write_file(dir / "gamma_dir2.csv", [&](std::ostream& out) { write_rate_product_csv(out, a.dir2); });
  }

  ojson m = manifest("detect", args, o.common, std::nullopt);
  m["triangle"] = triangle_json(ds.triangle, ds.pairs);
  m["window"] = window_json(ds.window);
  m["thresholds_bp"] = thresholds;
  write_json(dir / "manifest.json", m);
  std::cout << fmt::format("{} opportunities written to {}\n", a.ops.size(), dir.string());
  return 0;
}

// -------------------------------------------------------------- seasonal

int cmd_seasonal(const Common& c, const std::vector<std::string>& args) {
  const fs::path cfg = config_path(c);
  const Dataset ds = load_dataset(cfg, overrides_of(c));
  const Analysis a = analyze(ds);
  const fs::path dir = prepare_out_dir(c);

  write_file(dir / "hourly.csv", [&](std::ostream& out) { write_hourly_csv(out, hourly_profile(a.ops)); });
  write_file(dir / "daily.csv",
             [&](std::ostream& out) { write_daily_csv(out, daily_profile(a.ops, ds.window)); });
  write_file(dir / "sessions.csv", [&](std::ostream& out) {
    out << "hour,overlap,markets\n";
    for (int h = 0; h < 24; ++h) {
      std::string names;
      for (const auto& m : ds.sessions.markets()) {
        if (!m.hours.test(static_cast<std::size_t>(h))) continue;
        if (!names.empty()) names += ';';
        names += m.name;
      }
      out << fmt::format("{},{},{}\n", h, session_overlap_count(ds.sessions, h), names);
    }
  });

  ojson m = manifest("seasonal", args, c, std::nullopt);
  m["triangle"] = triangle_json(ds.triangle, ds.pairs);
  m["window"] = window_json(ds.window);
  write_json(dir / "manifest.json", m);
  std::cout << fmt::format("{} opportunities profiled in {}\n", a.ops.size(), dir.string());
  return 0;
}

// -------------------------------------------------------------- simulate

struct SimulateOptions {
  Common common;
  std::string scenario = "both";
  std::string gamma_t = "1,1.00005,1.0001";
  double fill_prob = 1.0;
  double loss_bp = 1.5;
  double volume = 1e6;
  std::size_t runs = 100;
  double fee = 0.0;
  std::int64_t long_min_run = 2;
  std::string p_grid = "0:1:101";
  std::string lambda_grid = "0:3:31";
  std::string curve_p_grid = "0:1:21";
  std::string breakeven_lambdas = "0.25:3:12";
  double surface_gamma_t = 1.0;
};

std::vector<FillScenario> parse_scenarios(const std::string& s) {
  if (s == "fixed") return {FillScenario::FixedFill};
  if (s == "duration") return {FillScenario::DurationFill};
  if (s == "both") return {FillScenario::FixedFill, FillScenario::DurationFill};
  throw std::invalid_argument(fmt::format("unknown scenario '{}' (fixed, duration, both)", s));
}

ojson nullable(std::optional<double> v) { return v ? ojson(*v) : ojson(nullptr); }

int cmd_simulate(const SimulateOptions& o, const std::vector<std::string>& args) {
  const std::vector<FillScenario> scenarios = parse_scenarios(o.scenario);
  const std::vector<double> gammas = parse_double_list(o.gamma_t, "gamma-t");
  const std::vector<double> p_grid = parse_grid(o.p_grid);
  const std::vector<double> lambda_grid = parse_grid(o.lambda_grid);
  const std::vector<double> curve_p = parse_grid(o.curve_p_grid);
  const std::vector<double> be_lambdas = parse_grid(o.breakeven_lambdas);
  const auto [seed, generated] = resolve_seed(o.common, std::nullopt);

  SimulationConfig base;
  base.fill_prob = o.fill_prob;
  base.loss_bp = o.loss_bp;
  base.volume = o.volume;
  base.runs = o.runs;
  base.seed = seed;
  base.long_min_run_length = o.long_min_run;
  base.fee_per_trade = o.fee;
  base.gamma_t = o.surface_gamma_t;
  base.validate();
  for (const double g : gammas) {
    SimulationConfig c = base;
    c.gamma_t = g;
    c.validate();
  }
  for (const double p : curve_p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("curve p grid values must lie in [0, 1]");
  }
  for (const double l : be_lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("break-even lambdas must be > 0");
  }

  const fs::path cfg = config_path(o.common);
  const Dataset ds = load_dataset(cfg, overrides_of(o.common));
  const Analysis a = analyze(ds);
  const fs::path dir = prepare_out_dir(o.common);

  SimulationConfig surface_cfg = base;
  surface_cfg.scenario = scenarios.front();
  const ProfitSurface surface = profit_surface(a.ops, p_grid, lambda_grid, surface_cfg);
  write_file(dir / "profit_surface.csv", [&](std::ostream& out) {
    out << "p,lambda_bp,mean_profit_bp\n";
    for (std::size_t ip = 0; ip < p_grid.size(); ++ip) {
      for (std::size_t il = 0; il < lambda_grid.size(); ++il) {
        out << fmt::format("{},{},{:.9f}\n", p_grid[ip], lambda_grid[il], surface.at(ip, il));
      }
    }
  });
  write_file(dir / "breakeven_contour.csv", [&](std::ostream& out) {
    out << "lambda_bp,p\n";
    for (std::size_t il = 0; il < lambda_grid.size(); ++il) {
      const auto& p = surface.break_even_p[il];
      out << fmt::format("{},{}\n", lambda_grid[il], p ? fmt::format("{:.6f}", *p) : std::string());
    }
  });

  std::ostringstream curves;
  curves << "scenario,gamma_t,p,total_profit_mean,total_profit_std\n";
  std::ostringstream breakeven;
  breakeven << "scenario,gamma_t,lambda_bp,analytic_p,simulated_p,simulated_p_std,analytic_clamped\n";
  ojson results = ojson::array();

  for (const FillScenario sc : scenarios) {
    for (const double g : gammas) {
      SimulationConfig c = base;
      c.scenario = sc;
      c.gamma_t = g;
      const std::vector<ArbitrageOpportunity> trades = select_trades(a.ops, g);
      const TradeStats ts = trade_stats(trades, c.long_min_run_length);

      for (const double p : curve_p) {
        c.fill_prob = p;
        const SimulationResult r = run_simulation(trades, c);
        curves << fmt::format("{},{},{},{:.6f},{:.6f}\n", scenario_name(sc), g, p, r.total_profit,
                              r.total_profit_std);
      }
      c.fill_prob = o.fill_prob;
      const SimulationResult r = run_simulation(trades, c);

      double analytic = 0.0;
      if (sc == FillScenario::FixedFill) {
        analytic = analytic_total_profit(FixedFillInputs{static_cast<std::int64_t>(ts.n_total), c.volume,
                                                         c.fill_prob, c.loss_bp, ts.mean_excess});
      } else {
        analytic = analytic_total_profit(DurationFillInputs{
            static_cast<std::int64_t>(ts.n_long), static_cast<std::int64_t>(ts.n_short), c.volume,
            c.fill_prob, c.loss_bp, ts.mean_excess_long, ts.mean_excess_short});
      }
      std::optional<double> analytic_p;
      bool clamped = false;
      if (!trades.empty() && c.loss_bp > 0.0) {
        const AnalyticBreakEven be =
            sc == FillScenario::FixedFill
                ? analytic_break_even(ts.mean_excess, c.loss_bp)
                : analytic_break_even(static_cast<std::int64_t>(ts.n_long), ts.mean_excess_long,
                                      static_cast<std::int64_t>(ts.n_short), ts.mean_excess_short, c.loss_bp);
        analytic_p = be.p;
        clamped = be.clamped;
      }

      if (trades.empty()) {
        warn(fmt::format("{} scenario, gamma_t {}: no trades, break-even undefined", scenario_name(sc), g));
      } else {
        const BreakEvenRequest req{sc, g, c.runs, c.seed, c.long_min_run_length};
        for (const BreakEvenResult& b : break_even_curve(trades, req, be_lambdas)) {
          breakeven << fmt::format("{},{},{},{:.6f},{:.6f},{:.6f},{}\n", scenario_name(sc), g, b.loss_bp,
                                   b.analytic_p, b.simulated_p, b.simulated_p_std,
                                   b.analytic_clamped ? "true" : "false");
        }
      }

      ojson entry{{"scenario", scenario_name(sc)},
                  {"gamma_t", g},
                  {"trades", ts.n_total},
                  {"long_trades", ts.n_long},
                  {"short_trades", ts.n_short},
                  {"mean_excess_bp", ts.mean_excess * 1e4},
                  {"mean_excess_long_bp", ts.mean_excess_long * 1e4},
                  {"mean_excess_short_bp", ts.mean_excess_short * 1e4}};
      entry["simulated"] = {{"total_profit_mean", r.total_profit},
                            {"total_profit_std", r.total_profit_std},
                            {"mean_profit_per_trade_bp", r.mean_profit_per_trade_bp},
                            {"trades_filled_mean", r.trades_filled},
                            {"transaction_costs", r.transaction_costs}};
      entry["analytic"] = {{"total_profit", analytic},
                           {"total_profit_after_costs", analytic - r.transaction_costs},
                           {"break_even_p", nullable(analytic_p)},
                           {"break_even_clamped", clamped}};
      results.push_back(entry);
    }
  }
  write_file(dir / "profit_curves.csv", [&](std::ostream& out) { out << curves.str(); });
  write_file(dir / "breakeven.csv", [&](std::ostream& out) { out << breakeven.str(); });

  ojson summary{{"seed", seed},
                {"runs", o.runs},
                {"volume", o.volume},
                {"fill_prob", o.fill_prob},
                {"loss_bp", o.loss_bp},
                {"fee_per_trade", o.fee},
                {"long_min_run_length", o.long_min_run},
                {"opportunities", a.ops.size()},
                {"results", results}};
  write_json(dir / "summary.json", summary);

  ojson m = manifest("simulate", args, o.common, seed);
  m["seed_generated"] = generated;
  m["triangle"] = triangle_json(ds.triangle, ds.pairs);
  m["window"] = window_json(ds.window);
  write_json(dir / "manifest.json", m);
  std::cout << fmt::format("simulated {} opportunities (seed {}) into {}\n", a.ops.size(), seed, dir.string());
  return 0;
}

// ----------------------------------------------------------------- synth

struct SynthOptions {
  Common common;
  std::string preset;
};

PairModel parse_model(const std::map<std::string, std::string>& f, const LiquidityProfile& profile,
                      int decimals, const std::string& pair) {
  PairModel m;
  m.decimals = decimals;
  double spread = 10.0;
  double gap = 0.0;
  for (const auto& [k, v] : f) {
    const std::string what = pair + " " + k;
    if (k == "mid") {
      m.initial_mid = parse_double(v, what);
    } else if (k == "vol") {
      m.volatility = parse_double(v, what);
    } else if (k == "spread") {
      spread = parse_double(v, what);
    } else if (k == "gap") {
      gap = parse_double(v, what);
    } else {
      throw ConfigError(fmt::format("model for {}: unknown field '{}'", pair, k));
    }
  }
  apply_liquidity(m, spread, gap, profile);
  return m;
}

ScheduleParams parse_schedule(const std::map<std::string, std::string>& f) {
  ScheduleParams p;
  for (const auto& [k, v] : f) {
    const std::string what = "schedule " + k;
    if (k == "rate") {
      p.rate_per_hour = parse_double(v, what);
    } else if (k == "rate_gain") {
      p.rate_gain = parse_double(v, what);
    } else if (k == "mean_duration") {
      p.mean_duration_s = parse_double(v, what);
    } else if (k == "duration_gain") {
      p.duration_gain = parse_double(v, what);
    } else if (k == "max_duration") {
      p.max_duration_s = static_cast<std::int64_t>(parse_double(v, what));
    } else if (k == "mag_min") {
      p.magnitude_min_bp = parse_double(v, what);
    } else if (k == "mag_mean") {
      p.magnitude_mean_bp = parse_double(v, what);
    } else if (k == "mag_max") {
      p.magnitude_max_bp = parse_double(v, what);
    } else {
      throw ConfigError(fmt::format("schedule: unknown field '{}'", k));
    }
  }
  return p;
}

InjectionSpec parse_injection(const KeyValueConfig::Entry& e) {
  const std::vector<std::string> f = split(e.value, ',');
  if (f.size() != 4) throw ParseError("injection must be START,DURATION,MAGNITUDE_BP,DIRECTION", e.line);
  InjectionSpec inj;
  try {
    inj.start = parse_timestamp(f[0]);
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what(), e.line);
  }
  const double d = parse_double(f[1], "injection duration");
  if (d != std::floor(d)) throw ParseError("injection duration must be whole seconds", e.line);
  inj.duration_seconds = static_cast<std::int64_t>(d);
  inj.magnitude_bp = parse_double(f[2], "injection magnitude");
  if (f[3] == "dir1") {
    inj.direction = Direction::Dir1;
  } else if (f[3] == "dir2") {
    inj.direction = Direction::Dir2;
  } else {
    throw ParseError(fmt::format("injection direction '{}' must be dir1 or dir2", f[3]), e.line);
  }
  return inj;
}

std::string format_weekdays(const std::set<Weekday>& days) {
  std::string s;
  for (const Weekday d : days) {
    if (!s.empty()) s += ',';
    s += weekday_name(d);
  }
  return s;
}

int cmd_synth(const SynthOptions& o, const std::vector<std::string>& args) {
  const fs::path cfg_path = config_path(o.common);
  const KeyValueConfig kv = KeyValueConfig::load(cfg_path);
  const Dataset ds = load_dataset(cfg_path, overrides_of(o.common));

  std::optional<std::uint64_t> config_seed;
  if (const auto s = kv.get("seed")) config_seed = parse_seed(*s);
  const auto [seed, generated] = resolve_seed(o.common, config_seed);

  const std::string preset = !o.preset.empty() ? o.preset : kv.get("preset").value_or("flat");
  LiquidityProfile profile;
  if (preset == "table3") {
    profile = liquidity_preset(ds.sessions);
  } else if (preset == "flat") {
    profile = flat_liquidity();
  } else {
    throw ConfigError(fmt::format("unknown preset '{}' (table3, flat)", preset));
  }

  SynthConfig sc;
  sc.seed = seed;
  sc.triangle = ds.triangle;
  sc.window = ds.window;
  std::array<bool, 3> have_model{};
  for (const auto& e : kv.get_all("model")) {
    const std::size_t comma = e.value.find(',');
    const std::string name(trim_view(std::string_view(e.value).substr(0, comma)));
    const std::string rest = comma == std::string::npos ? std::string() : e.value.substr(comma + 1);
    std::size_t idx = 3;
    for (std::size_t i = 0; i < 3; ++i) {
      if (ds.pairs[i].pair.name() == name) idx = i;
    }
    if (idx == 3) throw ParseError(fmt::format("model for unknown pair '{}'", name), e.line);
    sc.pairs[idx] = parse_model(parse_fields(rest), profile, ds.pairs[idx].decimals, name);
    have_model[idx] = true;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    if (!have_model[i]) {
      if (i != ds.triangle.direct_pair_index()) {
        throw ConfigError(fmt::format("missing model for {}", ds.pairs[i].pair.name()));
      }
      sc.pairs[i] = parse_model({}, profile, ds.pairs[i].decimals, ds.pairs[i].pair.name());
    }
  }
  for (const auto& e : kv.get_all("injection")) sc.injections.push_back(parse_injection(e));
  if (const auto s = kv.get("schedule")) {
    const auto scheduled = schedule_injections(ds.window, parse_schedule(parse_fields(*s)), profile, seed);
    // Explicit injections win; scheduled ones within a second of them are dropped.
    const std::size_t explicit_count = sc.injections.size();
    std::size_t dropped = 0;
    for (const InjectionSpec& inj : scheduled) {
      const bool clash = std::any_of(sc.injections.begin(), sc.injections.begin() + explicit_count,
                                     [&](const InjectionSpec& e) {
                                       return inj.start <= e.start + e.duration_seconds &&
                                              e.start <= inj.start + inj.duration_seconds;
                                     });
      if (clash) {
        ++dropped;
      } else {
        sc.injections.push_back(inj);
      }
    }
    if (dropped > 0) warn(fmt::format("dropped {} scheduled injections that touch explicit ones", dropped));
  }

  const SynthOutput out = generate(sc);
  const fs::path dir = prepare_out_dir(o.common);
  KeyValueConfig detect_cfg;
  detect_cfg.add("triangle", fmt::format("{},{},{}", ds.triangle.currencies[0], ds.triangle.currencies[1],
                                         ds.triangle.currencies[2]));
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string file = ds.pairs[i].pair.compact() + ".csv";
    write_file(dir / file, [&](std::ostream& s) { write_tick_csv(s, out.series[i]); });
    detect_cfg.add("pair", fmt::format("{},{},{}", ds.pairs[i].pair.name(), ds.pairs[i].decimals, file));
  }
  detect_cfg.add("window", fmt::format("{},{}", ds.window.start, ds.window.end));
  if (ds.window.weekdays) detect_cfg.add("weekdays", format_weekdays(*ds.window.weekdays));
  for (const auto& m : ds.sessions.markets()) detect_cfg.add("session." + m.name, format_hour_set(m.hours));
  write_file(dir / "triangle.cfg", [&](std::ostream& s) { s << detect_cfg.dump(); });
  write_json(dir / "injections.json", injections_to_json(out));

  ojson m = manifest("synth", args, o.common, seed);
  m["seed_generated"] = generated;
  m["preset"] = preset;
  m["triangle"] = triangle_json(ds.triangle, ds.pairs);
  m["window"] = window_json(ds.window);
  m["injections"] = out.ground_truth.size();
  write_json(dir / "manifest.json", m);
  std::cout << fmt::format("generated {} seconds with {} injections (seed {}) into {}\n",
                           out.series[0].size(), out.ground_truth.size(), seed, dir.string());
  return 0;
}

// --------------------------------------------------------------- compare

struct CompareOptions {
  Common common;
  std::vector<std::string> periods;
  HistogramOptions histogram;
};

int cmd_compare(const CompareOptions& o, const std::vector<std::string>& args) {
  if (o.periods.size() < 2) throw std::invalid_argument("compare needs at least two --period LABEL=CONFIG");
  std::vector<PeriodStats> stats;
  ojson sources = ojson::array();
  DatasetOverrides ov;
  if (!o.common.triangle.empty()) ov.triangle = o.common.triangle;
  for (const std::string& spec : o.periods) {
    const std::size_t eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
      throw std::invalid_argument(fmt::format("period '{}' must be LABEL=CONFIG", spec));
    }
    const std::string label = spec.substr(0, eq);
    const fs::path cfg = spec.substr(eq + 1);
    const Dataset ds = load_dataset(cfg, ov);
    const Analysis a = analyze(ds);
    stats.push_back({label, pooled_distribution(a, o.histogram), duration_stats(a.ops)});
    sources.push_back({{"label", label}, {"config", cfg.string()}, {"window", window_json(ds.window)},
                       {"triangle", triangle_json(ds.triangle, ds.pairs)}});
  }
  const ComparisonReport report = compare_periods(stats);
  const fs::path dir = prepare_out_dir(o.common);
  write_file(dir / "comparison.csv", [&](std::ostream& out) { write_comparison_csv(out, report); });
  write_file(dir / "comparison_deltas.csv", [&](std::ostream& out) { write_comparison_deltas_csv(out, report); });
  write_file(dir / "period_histograms.csv", [&](std::ostream& out) {
    out << "label,bin_lo,bin_hi,count,frequency\n";
    for (const PeriodStats& p : stats) {
      std::ostringstream one;
      write_histogram_csv(one, p.distribution);
      std::istringstream lines(one.str());
      std::string line;
      std::getline(lines, line);  // header
      while (std::getline(lines, line)) out << p.label << ',' << line << '\n';
    }
  });

  ojson m = manifest("compare", args, o.common, std::nullopt);
  m["periods"] = sources;
  write_json(dir / "manifest.json", m);
  std::cout << fmt::format("compared {} periods into {}\n", stats.size(), dir.string());
  return 0;
}

// ----------------------------------------------------------------- rerun

std::vector<std::string> rerun_arguments(const fs::path& manifest_path, const std::string& out_dir) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(fmt::format("{}: {}", manifest_path.string(), e.what()), 0);
  }
  if (!j.contains("arguments") || !j["arguments"].is_array()) {
    throw ConfigError(manifest_path.string() + ": no recorded arguments");
  }
  std::vector<std::string> argv;
  const auto recorded = j["arguments"].get<std::vector<std::string>>();
  for (std::size_t i = 0; i < recorded.size(); ++i) {
    if (out_dir.empty()) {
      argv.push_back(recorded[i]);
    } else if (recorded[i] == "--out-dir") {
      ++i;
    } else if (recorded[i].rfind("--out-dir=", 0) != 0) {
      argv.push_back(recorded[i]);
    }
  }
  if (argv.empty() || argv.front() == "rerun") throw ConfigError(manifest_path.string() + ": not replayable");
  if (!out_dir.empty()) {
    argv.push_back("--out-dir");
    argv.push_back(out_dir);
  }
  return argv;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Triangular arbitrage detection, profiling and simulation on FX tick data", "triarb"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", kToolVersion);

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic tick data with injected opportunities");
  add_common(synth_cmd, synth.common);
  synth_cmd->add_option("--preset", synth.preset, "liquidity preset: table3 or flat");

  DetectOptions detect;
  CLI::App* detect_cmd = app.add_subcommand("detect", "detect opportunities and summarize durations");
  add_common(detect_cmd, detect.common);
  detect_cmd->add_option("--thresholds", detect.thresholds, "magnitude thresholds in bp, ascending");
  add_histogram_options(detect_cmd, detect.histogram);
  detect_cmd->add_flag("--dump-gamma", detect.dump_gamma, "also write per-second rate products");

  Common seasonal;
  CLI::App* seasonal_cmd = app.add_subcommand("seasonal", "hourly and daily opportunity profiles");
  add_common(seasonal_cmd, seasonal);

  SimulateOptions sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Monte Carlo profit and break-even analysis");
  add_common(sim_cmd, sim.common);
  sim_cmd->add_option("--scenario", sim.scenario, "fixed, duration or both")->capture_default_str();
  sim_cmd->add_option("--gamma-t", sim.gamma_t, "trade thresholds on the initial rate product")->capture_default_str();
  sim_cmd->add_option("--p", sim.fill_prob, "fill probability for the summary")->capture_default_str();
  sim_cmd->add_option("--lambda-bp", sim.loss_bp, "loss per unfilled transaction, bp")->capture_default_str();
  sim_cmd->add_option("--volume", sim.volume, "volume per transaction")->capture_default_str();
  sim_cmd->add_option("--runs", sim.runs, "Monte Carlo runs")->capture_default_str();
  sim_cmd->add_option("--fee", sim.fee, "fee per individual trade")->capture_default_str();
  sim_cmd->add_option("--long-min-run", sim.long_min_run, "run length that counts as a long opportunity")
      ->capture_default_str();
  sim_cmd->add_option("--p-grid", sim.p_grid, "profit surface p grid (LO:HI:COUNT or list)")->capture_default_str();
  sim_cmd->add_option("--lambda-grid", sim.lambda_grid, "profit surface lambda grid, bp")->capture_default_str();
  sim_cmd->add_option("--curve-p-grid", sim.curve_p_grid, "p values for profit curves")->capture_default_str();
  sim_cmd->add_option("--breakeven-lambdas", sim.breakeven_lambdas, "lambda values for break-even, bp")
      ->capture_default_str();
  sim_cmd->add_option("--surface-gamma-t", sim.surface_gamma_t, "gamma_t used for the profit surface")
      ->capture_default_str();

  CompareOptions cmp;
  CLI::App* cmp_cmd = app.add_subcommand("compare", "compare periods side by side");
  add_common(cmp_cmd, cmp.common);
  cmp_cmd->add_option("--period", cmp.periods, "LABEL=CONFIG, repeat for each period");
  add_histogram_options(cmp_cmd, cmp.histogram);

  std::string rerun_manifest;
  std::string rerun_out;
  CLI::App* rerun_cmd = app.add_subcommand("rerun", "replay the invocation recorded in a manifest");
  rerun_cmd->add_option("manifest", rerun_manifest, "manifest.json")->required();
  rerun_cmd->add_option("--out-dir", rerun_out, "write into this directory instead");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::vector<std::string> invocation = args;
  try {
    if (synth_cmd->parsed()) return cmd_synth(synth, invocation);
    if (detect_cmd->parsed()) return cmd_detect(detect, invocation);
    if (seasonal_cmd->parsed()) return cmd_seasonal(seasonal, invocation);
    if (sim_cmd->parsed()) return cmd_simulate(sim, invocation);
    if (cmp_cmd->parsed()) return cmd_compare(cmp, invocation);
    if (rerun_cmd->parsed()) return run_cli(rerun_arguments(rerun_manifest, rerun_out));
  } catch (const Error& e) {
    std::cerr << "triarb: error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "triarb: error: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "triarb: error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "triarb: internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace triarb
