#include "triarb/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

#include "triarb/errors.hpp"
#include "triarb/rate_product.hpp"
#include "triarb/rng.hpp"

namespace triarb {

namespace {

std::string describe(const InjectionSpec& inj) {
  return fmt::format("injection at {} ({} s, {} bp, {})", format_iso(inj.start),
                     inj.duration_seconds, inj.magnitude_bp, direction_name(inj.direction));
}

void validate_models(const SynthConfig& cfg) {
  const std::size_t direct = cfg.triangle.direct_pair_index();
  for (std::size_t i = 0; i < 3; ++i) {
    const PairModel& m = cfg.pairs[i];
    const std::string name = cfg.triangle.pairs[i].name();
    if (m.decimals < 0 || m.decimals > 10) throw ConfigError(name + ": decimals must be in [0, 10]");
    if (i != direct && !(m.initial_mid > 0.0)) throw ConfigError(name + ": initial mid must be positive");
    if (!(m.volatility >= 0.0)) throw ConfigError(name + ": volatility must be >= 0");
    for (std::size_t h = 0; h < 24; ++h) {
      if (!(m.spread_points[h] > 0.0)) throw ConfigError(fmt::format("{}: spread at hour {} must be > 0", name, h));
      if (!(m.gap_rate[h] >= 0.0 && m.gap_rate[h] <= 1.0)) {
        throw ConfigError(fmt::format("{}: gap rate at hour {} must be in [0, 1]", name, h));
      }
    }
  }
}

std::int64_t spread_ticks(const PairModel& m, int hour) {
  return std::max<std::int64_t>(1, std::llround(m.spread_points[static_cast<std::size_t>(hour)]));
}

}  // namespace

SynthOutput generate(const SynthConfig& cfg) {
  try {
    cfg.window.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  validate_models(cfg);
  const TriangleSpec& tri = cfg.triangle;
  auto grid = std::make_shared<const TimeGrid>(cfg.window);
  const std::size_t n = grid->size();

  // Per-second injection marker: -1 none, else index into `injections`.
  std::vector<InjectionSpec> injections = cfg.injections;
  std::sort(injections.begin(), injections.end(),
            [](const InjectionSpec& a, const InjectionSpec& b) { return a.start < b.start; });
  std::vector<std::int32_t> marker(n, -1);
  for (std::size_t k = 0; k < injections.size(); ++k) {
    const InjectionSpec& inj = injections[k];
    if (inj.duration_seconds < 1) throw ConfigError(describe(inj) + ": duration must be >= 1");
    if (!(inj.magnitude_bp > 0.0)) throw ConfigError(describe(inj) + ": magnitude must be > 0");
    const auto first = grid->index_of(inj.start);
    if (!first) throw ConfigError(describe(inj) + ": start is outside the window grid");
    for (std::int64_t s = 0; s < inj.duration_seconds; ++s) {
      const std::size_t idx = *first + static_cast<std::size_t>(s);
      if (idx >= n || grid->at(idx) != inj.start + s) {
        throw ConfigError(describe(inj) + ": runs past a window or weekday boundary");
      }
      if (marker[idx] >= 0) throw ConfigError(describe(inj) + ": overlaps another injection");
      marker[idx] = static_cast<std::int32_t>(k);
    }
    // An adjacent same-direction episode would merge into one run.
    if (*first > 0 && grid->at(*first - 1) == inj.start - 1 && marker[*first - 1] >= 0 &&
        injections[static_cast<std::size_t>(marker[*first - 1])].direction == inj.direction) {
      throw ConfigError(describe(inj) + ": touches a previous injection in the same direction");
    }
  }

  const std::size_t direct = tri.direct_pair_index();
  const std::array<std::size_t, 2> cross = {tri.legs_dir1[0].pair_index, tri.legs_dir1[1].pair_index};
  std::array<int, 3> decimals{};
  std::array<double, 3> point{};
  for (std::size_t i = 0; i < 3; ++i) {
    decimals[i] = cfg.pairs[i].decimals;
    point[i] = 1.0 / pow10(decimals[i]);
  }

  std::array<std::mt19937_64, 3> walk_rng;
  std::array<std::mt19937_64, 3> gap_rng;
  for (std::size_t i = 0; i < 3; ++i) {
    walk_rng[i].seed(derive_seed(cfg.seed, 1 + i));
    gap_rng[i].seed(derive_seed(cfg.seed, 11 + i));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  std::array<double, 3> log_mid{};
  for (const std::size_t c : cross) log_mid[c] = std::log(cfg.pairs[c].initial_mid);

  std::array<std::vector<GridSlot>, 3> slots;
  for (auto& v : slots) v.resize(n);
  std::vector<double> realized(injections.size(), -std::numeric_limits<double>::infinity());

  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp t = grid->at(i);
    const int hour = hour_of_day(t);
    std::array<GridSlot, 3> now{};

    // Cross pairs: centred on their own random-walk mid.
    std::array<double, 3> mid{};
    for (const std::size_t c : cross) {
      const PairModel& m = cfg.pairs[c];
      if (i > 0) log_mid[c] += m.volatility * normal(walk_rng[c]);
      const std::int64_t s = spread_ticks(m, hour);
      const double centre = std::exp(log_mid[c]) / point[c];
      const std::int64_t bid = std::max<std::int64_t>(1, std::llround(centre - 0.5 * static_cast<double>(s)));
      now[c] = {bid, bid + s};
      mid[c] = 0.5 * static_cast<double>(now[c].bid + now[c].ask) * point[c];
    }

    // Direct pair: straddles the parity mid implied by the quoted cross mids.
    auto conversion = [&](const Leg& leg) { return leg.side == Side::Bid ? mid[leg.pair_index] : 1.0 / mid[leg.pair_index]; };
    const double closing = 1.0 / (conversion(tri.legs_dir1[0]) * conversion(tri.legs_dir1[1]));
    const double direct_mid = tri.legs_dir1[2].side == Side::Bid ? closing : 1.0 / closing;
    const std::int64_t s_direct = spread_ticks(cfg.pairs[direct], hour);
    const double centre = direct_mid / point[direct];
    const double half = 0.5 * static_cast<double>(s_direct);
    now[direct] = {std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(centre - half))),
                   static_cast<std::int64_t>(std::ceil(centre + half))};

    if (marker[i] >= 0) {
      const auto k = static_cast<std::size_t>(marker[i]);
      const InjectionSpec& inj = injections[k];
      const auto& legs = tri.legs(inj.direction);
      const Leg& dleg = *std::find_if(legs.begin(), legs.end(),
                                      [&](const Leg& l) { return l.pair_index == direct; });
      double others = 1.0;
      for (const Leg& l : legs) {
        if (l.pair_index == direct) continue;
        others *= leg_rate(l.side, now[l.pair_index].bid, now[l.pair_index].ask, decimals[l.pair_index]);
      }
      const double target = 1.0 + inj.magnitude_bp * 1e-4;
      // Shift the direct quote (spread kept) so this direction's gamma hits the target.
      const double ideal = dleg.side == Side::Bid ? target / (others * point[direct])
                                                  : others / (target * point[direct]);
      std::optional<GridSlot> best;
      double best_bp = 0.0;
      for (const double cand : {std::floor(ideal), std::ceil(ideal)}) {
        const auto ticks = static_cast<std::int64_t>(cand);
        GridSlot slot = dleg.side == Side::Bid ? GridSlot{ticks, ticks + s_direct}
                                               : GridSlot{ticks - s_direct, ticks};
        if (slot.bid <= 0) continue;
        std::array<GridSlot, 3> trial = now;
        trial[direct] = slot;
        const double bp = (rate_product_of(tri, inj.direction, trial, decimals) - 1.0) * 1e4;
        if (!best || std::abs(bp - inj.magnitude_bp) < std::abs(best_bp - inj.magnitude_bp)) {
          best = slot;
          best_bp = bp;
        }
      }
      if (!best || !(best_bp > 0.0) || std::abs(best_bp - inj.magnitude_bp) > kInjectionToleranceBp) {
        throw ConfigError(fmt::format("{}: point size of {} cannot realize it (nearest {:.4f} bp)",
                                      describe(inj), tri.pairs[direct].name(), best ? best_bp : 0.0));
      }
      now[direct] = *best;
      realized[k] = std::max(realized[k], best_bp);
    }

    for (std::size_t p = 0; p < 3; ++p) {
      const double u = uniform(gap_rng[p]);
      const bool gap = marker[i] < 0 && u < cfg.pairs[p].gap_rate[static_cast<std::size_t>(hour)];
      slots[p][i] = gap ? GridSlot{} : now[p];
    }
  }

  SynthOutput out{{PairSeries({tri.pairs[0], decimals[0]}, grid, std::move(slots[0])),
                   PairSeries({tri.pairs[1], decimals[1]}, grid, std::move(slots[1])),
                   PairSeries({tri.pairs[2], decimals[2]}, grid, std::move(slots[2]))},
                  injections,
                  realized};
  return out;
}

LiquidityProfile liquidity_preset(const SessionTable& table) {
  LiquidityProfile p;
  for (int h = 0; h < 24; ++h) {
    const auto i = static_cast<std::size_t>(h);
    p.overlap[i] = session_overlap_count(table, h);
    p.spread_factor[i] = 1.0 / (1.0 + p.overlap[i]);
    p.gap_factor[i] = 1.0 / (1.0 + p.overlap[i]);
  }
  return p;
}

LiquidityProfile flat_liquidity() {
  LiquidityProfile p;
  p.spread_factor.fill(1.0);
  p.gap_factor.fill(1.0);
  return p;
}

void apply_liquidity(PairModel& model, double base_spread_points, double base_gap_rate,
                     const LiquidityProfile& profile) {
  for (std::size_t h = 0; h < 24; ++h) {
    model.spread_points[h] = base_spread_points * profile.spread_factor[h];
    model.gap_rate[h] = std::clamp(base_gap_rate * profile.gap_factor[h], 0.0, 1.0);
  }
}

std::vector<InjectionSpec> schedule_injections(const SeriesWindow& window,
                                               const ScheduleParams& params,
                                               const LiquidityProfile& profile, std::uint64_t seed) {
  if (!(params.rate_per_hour >= 0.0) || !(params.mean_duration_s >= 1.0) || params.max_duration_s < 1 ||
      !(params.magnitude_min_bp > 0.0) || !(params.magnitude_mean_bp >= params.magnitude_min_bp) ||
      !(params.magnitude_max_bp >= params.magnitude_min_bp)) {
    throw ConfigError("invalid injection schedule parameters");
  }
  const TimeGrid grid(window);
  std::mt19937_64 rng(derive_seed(seed, 99));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double excess_mean = params.magnitude_mean_bp - params.magnitude_min_bp;

  std::vector<InjectionSpec> out;
  std::size_t next_free = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Timestamp t = grid.at(i);
    const auto h = static_cast<std::size_t>(hour_of_day(t));
    const double k = profile.overlap[h];
    const double per_second = params.rate_per_hour * (1.0 + params.rate_gain * k) / 3600.0;
    const double u = uniform(rng);
    if (i < next_free || !(u < per_second)) continue;

    const double mean_d = std::max(1.0, params.mean_duration_s / (1.0 + params.duration_gain * k));
    std::geometric_distribution<std::int64_t> geometric(1.0 / mean_d);
    std::int64_t d = std::min(params.max_duration_s, 1 + geometric(rng));
    std::int64_t room = 1;
    while (room < d && i + static_cast<std::size_t>(room) < grid.size() &&
           grid.at(i + static_cast<std::size_t>(room)) == t + room) {
      ++room;
    }
    d = std::min(d, room);

    double magnitude = params.magnitude_min_bp;
    if (excess_mean > 0.0) {
      std::exponential_distribution<double> excess(1.0 / excess_mean);
      do {
        magnitude = params.magnitude_min_bp + excess(rng);
      } while (magnitude > params.magnitude_max_bp);
    }
    const Direction dir = uniform(rng) < 0.5 ? Direction::Dir1 : Direction::Dir2;
    out.push_back({t, d, magnitude, dir});
    next_free = i + static_cast<std::size_t>(d) + 1;
  }
  return out;
}

nlohmann::ordered_json injections_to_json(const SynthOutput& out) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < out.ground_truth.size(); ++k) {
    const InjectionSpec& inj = out.ground_truth[k];
    list.push_back({{"start", inj.start},
                    {"start_iso", format_iso(inj.start)},
                    {"duration_seconds", inj.duration_seconds},
                    {"magnitude_bp", inj.magnitude_bp},
                    {"realized_magnitude_bp", out.realized_magnitude_bp[k]},
                    {"direction", direction_name(inj.direction)}});
  }
  return {{"injections", list}};
}

std::vector<InjectionSpec> injections_from_json(const nlohmann::json& j) {
  std::vector<InjectionSpec> out;
  for (const auto& e : j.at("injections")) {
    const std::string dir = e.at("direction").get<std::string>();
    if (dir != "dir1" && dir != "dir2") throw ConfigError("bad injection direction '" + dir + "'");
    out.push_back({e.at("start").get<Timestamp>(), e.at("duration_seconds").get<std::int64_t>(),
                   e.at("magnitude_bp").get<double>(), dir == "dir1" ? Direction::Dir1 : Direction::Dir2});
  }
  return out;
}

}  // namespace triarb
