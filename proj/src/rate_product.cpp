#include "triarb/rate_product.hpp"

#include <ostream>

#include <fmt/format.h>

namespace triarb {

double rate_product_of(const TriangleSpec& spec, Direction d, const std::array<GridSlot, 3>& slots,
                       const std::array<int, 3>& decimals) {
  // gamma = (product of numerators) / (product of denominators). Tick counts
  // and powers of ten are exact in double, so only the products and the final
  // division round.
  double num = 1.0;
  double den = 1.0;
  for (const Leg& leg : spec.legs(d)) {
    const GridSlot& slot = slots[leg.pair_index];
    if (!slot.present()) return 0.0;
    const double scale = pow10(decimals[leg.pair_index]);
    if (leg.side == Side::Bid) {
      num *= static_cast<double>(slot.bid);
      den *= scale;
    } else {
      num *= scale;
      den *= static_cast<double>(slot.ask);
    }
  }
  return num / den;
}

double rate_product_at(const AlignedTriangle& at, const TriangleSpec& spec, Direction d,
                       std::size_t i) {
  const std::array<GridSlot, 3> slots = {at.leg(0).slots()[i], at.leg(1).slots()[i],
                                         at.leg(2).slots()[i]};
  const std::array<int, 3> decimals = {at.leg(0).decimals(), at.leg(1).decimals(),
                                       at.leg(2).decimals()};
  return rate_product_of(spec, d, slots, decimals);
}

std::pair<RateProductSeries, RateProductSeries> compute_rate_products(const AlignedTriangle& at,
                                                                      const TriangleSpec& spec) {
  RateProductSeries dir1{Direction::Dir1, {}};
  RateProductSeries dir2{Direction::Dir2, {}};
  const std::size_t n = at.size();
  dir1.points.resize(n);
  dir2.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp t = at.timestamp(i);
    dir1.points[i] = {t, rate_product_at(at, spec, Direction::Dir1, i)};
    dir2.points[i] = {t, rate_product_at(at, spec, Direction::Dir2, i)};
  }
  return {std::move(dir1), std::move(dir2)};
}

void write_rate_product_csv(std::ostream& out, const RateProductSeries& series) {
  out << "timestamp,gamma\n";
  for (const RateProductPoint& p : series.points) {
    out << fmt::format("{},{:.12f}\n", p.timestamp, p.gamma);
  }
}

}  // namespace triarb
