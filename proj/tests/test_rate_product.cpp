#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "support.hpp"
#include "triarb/rate_product.hpp"

using namespace triarb;
using boost::multiprecision::cpp_rational;

namespace {

// Exact gamma from tick counts: bid legs contribute bid / 10^d, inverse-ask
// legs 10^d / ask.
double exact_gamma(const TriangleSpec& t, Direction d, const std::array<GridSlot, 3>& slots,
                   const std::array<int, 3>& decimals) {
  cpp_rational g = 1;
  for (const Leg& leg : t.legs(d)) {
    cpp_rational scale = 1;
    for (int k = 0; k < decimals[leg.pair_index]; ++k) scale *= 10;
    const GridSlot& s = slots[leg.pair_index];
    if (leg.side == Side::Bid) {
      g *= cpp_rational(s.bid) / scale;
    } else {
      g *= scale / cpp_rational(s.ask);
    }
  }
  return static_cast<double>(g);
}

}  // namespace

TEST_SUITE("rate_product") {

TEST_CASE("worked EUR->USD->JPY->EUR example") {
  const TriangleSpec t = testing::eur_usd_jpy();
  const std::array<GridSlot, 3> slots = {GridSlot{12065, 12066}, GridSlot{11572, 11573}, GridSlot{13959, 13960}};
  const double g = rate_product_of(t, Direction::Dir1, slots, {4, 2, 2});
  CHECK(std::round(g * 1e9) / 1e9 == doctest::Approx(1.000115903).epsilon(1e-12));
  CHECK(std::abs(g - 1.2065 * 115.72 / 139.60) < 1e-15);
  // The reverse direction sells at the other sides of the same quotes.
  const double g2 = rate_product_of(t, Direction::Dir2, slots, {4, 2, 2});
  CHECK(g2 == doctest::Approx(139.59 / 115.73 / 1.2066).epsilon(1e-14));
}

TEST_CASE("a missing leg zeroes only the directions that need it") {
  const TriangleSpec t = testing::eur_usd_jpy();
  std::array<GridSlot, 3> slots = {GridSlot{12065, 12066}, GridSlot{11572, 11573}, GridSlot{}};
  CHECK(rate_product_of(t, Direction::Dir1, slots, {4, 2, 2}) == 0.0);
  CHECK(rate_product_of(t, Direction::Dir2, slots, {4, 2, 2}) == 0.0);
  slots[2] = GridSlot{13959, 13960};
  slots[0] = GridSlot{};
  CHECK(rate_product_of(t, Direction::Dir1, slots, {4, 2, 2}) == 0.0);
  CHECK(rate_product_of(t, Direction::Dir2, slots, {4, 2, 2}) == 0.0);
}

TEST_CASE("rate product matches an exact rational oracle") {
  const TriangleSpec t = testing::eur_usd_jpy();
  std::mt19937_64 rng(2005);
  std::uniform_int_distribution<int> dec(0, 6);
  std::uniform_int_distribution<std::int64_t> ticks(1, 50'000'000);
  std::uniform_int_distribution<std::int64_t> spread(0, 500);
  for (int i = 0; i < 1000; ++i) {
    std::array<GridSlot, 3> slots;
    std::array<int, 3> decimals;
    for (std::size_t k = 0; k < 3; ++k) {
      const std::int64_t bid = ticks(rng);
      slots[k] = {bid, bid + spread(rng)};
      decimals[k] = dec(rng);
    }
    for (const Direction d : {Direction::Dir1, Direction::Dir2}) {
      const double expected = exact_gamma(t, d, slots, decimals);
      const double got = rate_product_of(t, d, slots, decimals);
      CHECK(std::abs(got - expected) <= 1e-12 * expected);
    }
  }
}

TEST_CASE("product of both directions never exceeds one for uncrossed quotes") {
  const TriangleSpec t = testing::eur_usd_jpy();
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<std::int64_t> ticks(1000, 2'000'000);
  std::uniform_int_distribution<std::int64_t> spread(0, 50);
  for (int i = 0; i < 1000; ++i) {
    std::array<GridSlot, 3> slots;
    for (auto& s : slots) {
      const std::int64_t bid = ticks(rng);
      s = {bid, bid + spread(rng)};
    }
    const double g1 = rate_product_of(t, Direction::Dir1, slots, {4, 2, 2});
    const double g2 = rate_product_of(t, Direction::Dir2, slots, {4, 2, 2});
    CHECK(g1 * g2 <= 1.0 + 1e-12);
  }
}

TEST_CASE("series over an aligned triangle") {
  const TriangleSpec t = testing::eur_usd_jpy();
  auto grid = std::make_shared<const TimeGrid>(SeriesWindow{10, 13, std::nullopt});
  const PairSeries eu({{"EUR", "USD"}, 4}, grid, {GridSlot{12065, 12066}, GridSlot{}, GridSlot{12065, 12066}});
  const PairSeries uj({{"USD", "JPY"}, 2}, grid,
                      {GridSlot{11572, 11573}, GridSlot{11572, 11573}, GridSlot{11572, 11573}});
  const PairSeries ej({{"EUR", "JPY"}, 2}, grid,
                      {GridSlot{13959, 13960}, GridSlot{13959, 13960}, GridSlot{13959, 13975}});
  const AlignedTriangle at = align_triangle(eu, uj, ej, t);
  const auto [d1, d2] = compute_rate_products(at, t);
  REQUIRE(d1.points.size() == 3);
  CHECK(d1.direction == Direction::Dir1);
  CHECK(d2.direction == Direction::Dir2);
  CHECK(d1.points[0].timestamp == 10);
  CHECK(d1.points[0].gamma > 1.0);
  CHECK(d1.points[1].gamma == 0.0);
  CHECK(d2.points[1].gamma == 0.0);
  CHECK(d1.points[2].gamma < 1.0);
  CHECK(rate_product_at(at, t, Direction::Dir1, 0) == d1.points[0].gamma);

  std::ostringstream out;
  write_rate_product_csv(out, d1);
  const auto text = out.str();
  CHECK(text.rfind("timestamp,gamma\n10,1.000115902", 0) == 0);
  CHECK(text.find("\n11,0.000000000000\n") != std::string::npos);
}

}  // TEST_SUITE
