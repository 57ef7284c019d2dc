#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triarb/time_utils.hpp"

namespace triarb {

struct CurrencyPair {
  std::string base;
  std::string quote;

  /// "EUR/USD" (a '/' separator is required).
  static CurrencyPair parse(std::string_view text);
  std::string name() const { return base + "/" + quote; }
  std::string compact() const { return base + quote; }

  bool operator==(const CurrencyPair&) const = default;
};

struct PairSpec {
  CurrencyPair pair;
  int decimals = 4;  // point = 10^-decimals

  bool operator==(const PairSpec&) const = default;
};

// bid/ask are tick counts at the owning series' decimals.
struct Quote {
  Timestamp timestamp = 0;
  std::int64_t bid = 0;
  std::int64_t ask = 0;

  bool operator==(const Quote&) const = default;
};

struct SeriesWindow {
  Timestamp start = 0;
  Timestamp end = 0;  // exclusive
  std::optional<std::set<Weekday>> weekdays;

  void validate() const;
  bool contains(Timestamp t) const;
  std::vector<Timestamp> grid_seconds() const;

  bool operator==(const SeriesWindow&) const = default;
};

// The per-second sampling grid of a window. Weekday filtering can make it
// non-contiguous in time; consumers must check timestamp adjacency.
class TimeGrid {
 public:
  explicit TimeGrid(SeriesWindow window);

  const SeriesWindow& window() const { return window_; }
  std::span<const Timestamp> seconds() const { return seconds_; }
  std::size_t size() const { return seconds_.size(); }
  Timestamp at(std::size_t i) const { return seconds_[i]; }
  std::optional<std::size_t> index_of(Timestamp t) const;

  bool operator==(const TimeGrid& other) const {
    return window_ == other.window_ && seconds_ == other.seconds_;
  }

 private:
  SeriesWindow window_;
  std::vector<Timestamp> seconds_;
};

// One grid second for one pair. bid == 0 marks a missing price.
struct GridSlot {
  std::int64_t bid = 0;
  std::int64_t ask = 0;

  bool present() const { return bid > 0; }
  bool operator==(const GridSlot&) const = default;
};

class PairSeries {
 public:
  PairSeries(PairSpec spec, std::shared_ptr<const TimeGrid> grid, std::vector<GridSlot> slots,
             std::vector<std::string> warnings = {});

  // Collapses ticks onto the window grid (last tick in a second wins).
  // Ticks must be non-decreasing in timestamp; those outside the grid are dropped.
  static PairSeries from_quotes(PairSpec spec, std::shared_ptr<const TimeGrid> grid,
                                std::span<const Quote> ticks);

  const PairSpec& spec() const { return spec_; }
  const CurrencyPair& pair() const { return spec_.pair; }
  int decimals() const { return spec_.decimals; }
  const TimeGrid& grid() const { return *grid_; }
  const std::shared_ptr<const TimeGrid>& shared_grid() const { return grid_; }

  std::size_t size() const { return slots_.size(); }
  std::span<const GridSlot> slots() const { return slots_; }
  std::optional<Quote> at(std::size_t i) const;
  bool missing(std::size_t i) const { return !slots_[i].present(); }
  std::size_t missing_count() const;

  /// Present grid entries, in time order.
  std::vector<Quote> quotes() const;

  const std::vector<std::string>& warnings() const { return warnings_; }

  bool operator==(const PairSeries& other) const;

 private:
  PairSpec spec_;
  std::shared_ptr<const TimeGrid> grid_;
  std::vector<GridSlot> slots_;
  std::vector<std::string> warnings_;
};

/// Reads a `timestamp,bid,ask` tick CSV. Timestamps are epoch seconds or
/// ISO-8601 UTC, chosen by the first data row. Throws IoError, ParseError,
/// OrderingError, or EmptySeriesError.
PairSeries load_pair_series(const std::filesystem::path& path, const PairSpec& spec,
                            std::shared_ptr<const TimeGrid> grid);
PairSeries read_pair_series(std::istream& in, const PairSpec& spec,
                            std::shared_ptr<const TimeGrid> grid);
PairSeries load_pair_series(const std::filesystem::path& path, const PairSpec& spec,
                            const SeriesWindow& window);

/// Writes present grid entries as `timestamp,bid,ask` with epoch seconds.
void write_tick_csv(std::ostream& out, const PairSeries& series);

enum class Side { Bid, InvAsk };
enum class Direction { Dir1, Dir2 };

std::string_view direction_name(Direction d);

struct Leg {
  std::size_t pair_index = 0;
  Side side = Side::Bid;
  std::string from;
  std::string to;
};

// Direction 1 is A->B->C->A and direction 2 is A->C->B->A. A leg uses the
// bid when it sells the pair's base currency and 1/ask when it buys it.
struct TriangleSpec {
  std::array<std::string, 3> currencies;
  std::array<CurrencyPair, 3> pairs;
  std::array<Leg, 3> legs_dir1;
  std::array<Leg, 3> legs_dir2;

  static TriangleSpec make(const std::array<std::string, 3>& currencies,
                           const std::array<CurrencyPair, 3>& pairs);

  const std::array<Leg, 3>& legs(Direction d) const {
    return d == Direction::Dir1 ? legs_dir1 : legs_dir2;
  }
  /// The pair joining A and C; its mid is fixed by parity in synthetic data.
  std::size_t direct_pair_index() const { return legs_dir1[2].pair_index; }
  std::string describe(Direction d) const;
};

// Three series on one grid, ordered as TriangleSpec::pairs.
class AlignedTriangle {
 public:
  AlignedTriangle(std::array<PairSeries, 3> legs) : legs_(std::move(legs)) {}

  const PairSeries& leg(std::size_t i) const { return legs_[i]; }
  const TimeGrid& grid() const { return legs_[0].grid(); }
  std::size_t size() const { return legs_[0].size(); }
  Timestamp timestamp(std::size_t i) const { return grid().at(i); }
  bool missing(std::size_t leg, std::size_t i) const { return legs_[leg].missing(i); }
  bool complete(std::size_t i) const {
    return !missing(0, i) && !missing(1, i) && !missing(2, i);
  }

  bool operator==(const AlignedTriangle&) const = default;

 private:
  std::array<PairSeries, 3> legs_;
};

/// Orders the series to match spec.pairs; throws AlignmentError when a pair
/// is absent or the grids differ.
AlignedTriangle align_triangle(const PairSeries& a, const PairSeries& b, const PairSeries& c,
                               const TriangleSpec& spec);

}  // namespace triarb
