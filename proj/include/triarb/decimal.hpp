#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace triarb {

// Prices are held as integer multiples of 10^-decimals (the pair's point).

/// Parses a non-negative decimal string into ticks. Extra fractional digits
/// are accepted only when they are zeros. Throws std::invalid_argument.
std::int64_t parse_scaled(std::string_view text, int decimals);

std::string format_scaled(std::int64_t ticks, int decimals);

double pow10(int exponent);

inline double ticks_to_double(std::int64_t ticks, int decimals) {
  return static_cast<double>(ticks) / pow10(decimals);
}

}  // namespace triarb
