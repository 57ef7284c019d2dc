#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "triarb/decimal.hpp"
#include "triarb/market_data.hpp"

namespace triarb {

struct RateProductPoint {
  Timestamp timestamp = 0;
  double gamma = 0.0;  // 0 when a required price was missing
};

struct RateProductSeries {
  Direction direction = Direction::Dir1;
  std::vector<RateProductPoint> points;

  bool operator==(const RateProductSeries&) const = default;
};

// Effective conversion rate of one leg: bid, or 1/ask.
inline double leg_rate(Side side, std::int64_t bid, std::int64_t ask, int decimals) {
  return side == Side::Bid ? ticks_to_double(bid, decimals) : 1.0 / ticks_to_double(ask, decimals);
}

// gamma for one direction from one second's slots (ordered as spec.pairs),
// or 0 if a required price is missing.
double rate_product_of(const TriangleSpec& spec, Direction d, const std::array<GridSlot, 3>& slots,
                       const std::array<int, 3>& decimals);

// gamma for one direction at grid index i, or 0 if a leg is missing.
double rate_product_at(const AlignedTriangle& at, const TriangleSpec& spec, Direction d,
                       std::size_t i);

std::pair<RateProductSeries, RateProductSeries> compute_rate_products(const AlignedTriangle& at,
                                                                      const TriangleSpec& spec);

void write_rate_product_csv(std::ostream& out, const RateProductSeries& series);

}  // namespace triarb
