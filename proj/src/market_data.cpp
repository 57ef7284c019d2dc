#include "triarb/market_data.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

#include "triarb/decimal.hpp"
#include "triarb/errors.hpp"

namespace triarb {

CurrencyPair CurrencyPair::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos || slash == 0 || slash + 1 >= text.size()) {
    throw std::invalid_argument("currency pair must look like BASE/QUOTE, got '" +
                                std::string(text) + "'");
  }
  return {std::string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
}

void SeriesWindow::validate() const {
  if (start >= end) {
    throw std::invalid_argument(fmt::format("window start {} must precede end {}", start, end));
  }
}

bool SeriesWindow::contains(Timestamp t) const {
  if (t < start || t >= end) return false;
  return !weekdays || weekdays->count(weekday_of(t)) > 0;
}

std::vector<Timestamp> SeriesWindow::grid_seconds() const {
  validate();
  std::vector<Timestamp> out;
  if (!weekdays) {
    out.resize(static_cast<std::size_t>(end - start));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = start + static_cast<Timestamp>(i);
    return out;
  }
  // Whole days are admitted or skipped at once.
  Timestamp t = start;
  while (t < end) {
    const Timestamp next_day = (day_index(t) + 1) * kSecondsPerDay;
    const Timestamp stop = std::min(next_day, end);
    if (weekdays->count(weekday_of(t)) > 0) {
      for (Timestamp s = t; s < stop; ++s) out.push_back(s);
    }
    t = stop;
  }
  return out;
}

TimeGrid::TimeGrid(SeriesWindow window)
    : window_(std::move(window)), seconds_(window_.grid_seconds()) {}

std::optional<std::size_t> TimeGrid::index_of(Timestamp t) const {
  if (!window_.weekdays) {
    if (t < window_.start || t >= window_.end) return std::nullopt;
    return static_cast<std::size_t>(t - window_.start);
  }
  const auto it = std::lower_bound(seconds_.begin(), seconds_.end(), t);
  if (it == seconds_.end() || *it != t) return std::nullopt;
  return static_cast<std::size_t>(it - seconds_.begin());
}

PairSeries::PairSeries(PairSpec spec, std::shared_ptr<const TimeGrid> grid,
                       std::vector<GridSlot> slots, std::vector<std::string> warnings)
    : spec_(std::move(spec)),
      grid_(std::move(grid)),
      slots_(std::move(slots)),
      warnings_(std::move(warnings)) {
  if (!grid_) throw std::invalid_argument("PairSeries requires a grid");
  if (slots_.size() != grid_->size()) {
    throw std::invalid_argument("PairSeries slot count does not match its grid");
  }
  for (const GridSlot& s : slots_) {
    if (s.bid < 0 || (s.bid > 0) != (s.ask > 0)) {
      throw std::invalid_argument("PairSeries slot holds a non-positive price");
    }
  }
}

PairSeries PairSeries::from_quotes(PairSpec spec, std::shared_ptr<const TimeGrid> grid,
                                   std::span<const Quote> ticks) {
  std::vector<GridSlot> slots(grid->size());
  std::size_t crossed = 0;
  Timestamp previous = 0;
  for (std::size_t i = 0; i < ticks.size(); ++i) {
    const Quote& q = ticks[i];
    if (i > 0 && q.timestamp < previous) {
      throw OrderingError(fmt::format("{}: tick at {} precedes tick at {}", spec.pair.name(),
                                      q.timestamp, previous));
    }
    previous = q.timestamp;
    if (q.bid <= 0 || q.ask <= 0) {
      throw std::invalid_argument(spec.pair.name() + ": prices must be positive");
    }
    const auto idx = grid->index_of(q.timestamp);
    if (!idx) continue;
    if (q.bid > q.ask) ++crossed;
    slots[*idx] = GridSlot{q.bid, q.ask};
  }
  std::vector<std::string> warnings;
  if (crossed > 0) {
    warnings.push_back(
        fmt::format("{}: {} crossed quote(s) with bid > ask", spec.pair.name(), crossed));
  }
  return PairSeries(std::move(spec), std::move(grid), std::move(slots), std::move(warnings));
}

std::optional<Quote> PairSeries::at(std::size_t i) const {
  const GridSlot& s = slots_[i];
  if (!s.present()) return std::nullopt;
  return Quote{grid_->at(i), s.bid, s.ask};
}

std::size_t PairSeries::missing_count() const {
  return static_cast<std::size_t>(
      std::count_if(slots_.begin(), slots_.end(), [](const GridSlot& s) { return !s.present(); }));
}

std::vector<Quote> PairSeries::quotes() const {
  std::vector<Quote> out;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].present()) out.push_back({grid_->at(i), slots_[i].bid, slots_[i].ask});
  }
  return out;
}

bool PairSeries::operator==(const PairSeries& other) const {
  return spec_ == other.spec_ && (grid_ == other.grid_ || *grid_ == *other.grid_) &&
         slots_ == other.slots_;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

PairSeries read_pair_series(std::istream& in, const PairSpec& spec,
                            std::shared_ptr<const TimeGrid> grid) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::optional<bool> iso_format;
  std::optional<RawTime> previous;
  std::vector<Quote> ticks;

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "timestamp,bid,ask") {
        throw ParseError("expected header 'timestamp,bid,ask'", line_no);
      }
      header_seen = true;
      continue;
    }
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw ParseError("expected 3 fields", line_no);
    }
    const std::string_view ts_text = trim(row.substr(0, c1));
    const std::string_view bid_text = trim(row.substr(c1 + 1, c2 - c1 - 1));
    const std::string_view ask_text = trim(row.substr(c2 + 1));

    if (!iso_format) iso_format = looks_like_iso(ts_text);
    const auto raw = *iso_format ? parse_iso(ts_text) : parse_epoch(ts_text);
    if (!raw) {
      throw ParseError(fmt::format("bad {} timestamp '{}'", *iso_format ? "ISO-8601" : "epoch",
                                   ts_text),
                       line_no);
    }
    if (previous && *raw < *previous) {
      throw OrderingError(fmt::format("{}: line {}: timestamp '{}' is earlier than the previous row",
                                      spec.pair.name(), line_no, ts_text));
    }
    previous = raw;

    Quote q{raw->seconds, 0, 0};
    try {
      q.bid = parse_scaled(bid_text, spec.decimals);
      q.ask = parse_scaled(ask_text, spec.decimals);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), line_no);
    }
    if (q.bid <= 0 || q.ask <= 0) throw ParseError("prices must be positive", line_no);
    if (grid->index_of(q.timestamp)) ticks.push_back(q);
  }
  if (!header_seen) throw ParseError("missing header 'timestamp,bid,ask'", line_no + 1);
  if (ticks.empty()) {
    throw EmptySeriesError(spec.pair.name() + ": no ticks inside the window");
  }
  return PairSeries::from_quotes(spec, std::move(grid), ticks);
}

PairSeries load_pair_series(const std::filesystem::path& path, const PairSpec& spec,
                            std::shared_ptr<const TimeGrid> grid) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open tick file " + path.string());
  try {
    return read_pair_series(in, spec, std::move(grid));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

PairSeries load_pair_series(const std::filesystem::path& path, const PairSpec& spec,
                            const SeriesWindow& window) {
  return load_pair_series(path, spec, std::make_shared<const TimeGrid>(window));
}

void write_tick_csv(std::ostream& out, const PairSeries& series) {
  out << "timestamp,bid,ask\n";
  const auto slots = series.slots();
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (!slots[i].present()) continue;
    out << series.grid().at(i) << ',' << format_scaled(slots[i].bid, series.decimals()) << ','
        << format_scaled(slots[i].ask, series.decimals()) << '\n';
  }
}

std::string_view direction_name(Direction d) { return d == Direction::Dir1 ? "dir1" : "dir2"; }

TriangleSpec TriangleSpec::make(const std::array<std::string, 3>& currencies,
                                const std::array<CurrencyPair, 3>& pairs) {
  TriangleSpec spec{currencies, pairs, {}, {}};

  auto leg_for = [&](const std::string& from, const std::string& to) {
    std::optional<Leg> found;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const CurrencyPair& p = pairs[i];
      std::optional<Side> side;
      if (p.base == from && p.quote == to) side = Side::Bid;
      if (p.base == to && p.quote == from) side = Side::InvAsk;
      if (!side) continue;
      if (found) throw std::invalid_argument("two pairs convert " + from + " to " + to);
      found = Leg{i, *side, from, to};
    }
    if (!found) throw std::invalid_argument("no pair converts " + from + " to " + to);
    return *found;
  };

  const auto& [a, b, c] = currencies;
  if (a == b || b == c || a == c) throw std::invalid_argument("triangle currencies must differ");
  spec.legs_dir1 = {leg_for(a, b), leg_for(b, c), leg_for(c, a)};
  spec.legs_dir2 = {leg_for(a, c), leg_for(c, b), leg_for(b, a)};

  std::array<bool, 3> used{};
  for (const Leg& l : spec.legs_dir1) used[l.pair_index] = true;
  if (!(used[0] && used[1] && used[2])) {
    throw std::invalid_argument("every pair must carry one leg of the triangle");
  }
  return spec;
}

std::string TriangleSpec::describe(Direction d) const {
  const auto& l = legs(d);
  return fmt::format("{}->{}->{}->{}", l[0].from, l[1].from, l[2].from, l[2].to);
}

AlignedTriangle align_triangle(const PairSeries& a, const PairSeries& b, const PairSeries& c,
                               const TriangleSpec& spec) {
  const std::array<const PairSeries*, 3> inputs = {&a, &b, &c};
  for (const PairSeries* s : inputs) {
    if (!(s->grid() == a.grid())) {
      throw AlignmentError(fmt::format("{} and {} are on different grids", a.pair().name(),
                                       s->pair().name()));
    }
  }
  auto find = [&](const CurrencyPair& pair) -> const PairSeries& {
    const PairSeries* hit = nullptr;
    for (const PairSeries* s : inputs) {
      if (s->pair() == pair) {
        if (hit) throw AlignmentError("pair " + pair.name() + " supplied twice");
        hit = s;
      }
    }
    if (!hit) throw AlignmentError("no series for pair " + pair.name());
    return *hit;
  };
  return AlignedTriangle({find(spec.pairs[0]), find(spec.pairs[1]), find(spec.pairs[2])});
}

}  // namespace triarb
