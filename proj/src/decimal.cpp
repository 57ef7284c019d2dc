#include "triarb/decimal.hpp"

#include <array>
#include <cctype>
#include <cstdlib>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>

namespace triarb {

double pow10(int exponent) {
  static constexpr std::array<double, 19> kTable = {
      1e0, 1e1, 1e2,  1e3,  1e4,  1e5,  1e6,  1e7,  1e8, 1e9,
      1e10, 1e11, 1e12, 1e13, 1e14, 1e15, 1e16, 1e17, 1e18};
  if (exponent < 0 || exponent >= static_cast<int>(kTable.size())) {
    throw std::invalid_argument("decimal exponent out of range");
  }
  return kTable[static_cast<std::size_t>(exponent)];
}

std::int64_t parse_scaled(std::string_view text, int decimals) {
  if (decimals < 0 || decimals > 12) throw std::invalid_argument("unsupported decimals");
  std::size_t pos = 0;
  if (pos < text.size() && text[pos] == '+') ++pos;
  constexpr std::int64_t kLimit = std::numeric_limits<std::int64_t>::max() / 10;
  std::int64_t value = 0;
  bool any_digit = false;
  for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
    if (value > kLimit) throw std::invalid_argument("price out of range");
    value = value * 10 + (text[pos] - '0');
    any_digit = true;
  }
  int frac_digits = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    for (; pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])); ++pos) {
      any_digit = true;
      const int digit = text[pos] - '0';
      if (frac_digits < decimals) {
        if (value > kLimit) throw std::invalid_argument("price out of range");
        value = value * 10 + digit;
        ++frac_digits;
      } else if (digit != 0) {
        throw std::invalid_argument("price '" + std::string(text) + "' is finer than the point size");
      }
    }
  }
  if (!any_digit || pos != text.size()) {
    throw std::invalid_argument("invalid decimal '" + std::string(text) + "'");
  }
  for (; frac_digits < decimals; ++frac_digits) {
    if (value > kLimit) throw std::invalid_argument("price out of range");
    value *= 10;
  }
  return value;
}

std::string format_scaled(std::int64_t ticks, int decimals) {
  const bool negative = ticks < 0;
  const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(ticks + 1)) + 1
                                     : static_cast<std::uint64_t>(ticks);
  const auto scale = static_cast<std::uint64_t>(pow10(decimals));
  std::string out = negative ? "-" : "";
  out += fmt::format("{}", mag / scale);
  if (decimals > 0) out += fmt::format(".{:0{}d}", mag % scale, decimals);
  return out;
}

}  // namespace triarb
