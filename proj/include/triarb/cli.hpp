#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "triarb/market_data.hpp"
#include "triarb/seasonal.hpp"

namespace triarb {

inline constexpr const char* kToolVersion = "0.1.0";
// Consulted when --config is not given.
inline constexpr const char* kConfigEnvVar = "TRIARB_CONFIG";

/// Entry point for the `triarb` executable; args exclude the program name.
/// Returns 0 on success, 2 on usage or input errors, 1 on internal errors.
int run_cli(const std::vector<std::string>& args);

// A triangle configuration file resolved against command-line overrides.
struct Dataset {
  std::filesystem::path config_path;
  TriangleSpec triangle;
  SeriesWindow window;
  std::array<PairSpec, 3> pairs;  // ordered as triangle.pairs
  std::array<std::filesystem::path, 3> files;
  SessionTable sessions;
};

struct DatasetOverrides {
  std::optional<std::string> window;
  std::optional<std::string> triangle;
};

Dataset load_dataset(const std::filesystem::path& config_path, const DatasetOverrides& overrides);

/// "start,end" with epoch seconds or ISO-8601 / YYYY-MM-DD bounds.
SeriesWindow parse_window(std::string_view text, std::optional<std::string_view> weekdays);

/// "lo:hi:count" (inclusive linspace) or a comma list.
std::vector<double> parse_grid(std::string_view text);

}  // namespace triarb
