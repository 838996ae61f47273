#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rice/types.h"

namespace rice {

/// Values for optional table columns when a row leaves them out.
struct RegionDefaults {
    std::optional<double> g_sigma;
    std::optional<double> delta_sigma;
    std::optional<double> delta_k;
    bool operator==(const RegionDefaults&) const = default;
};

/// Required columns, in canonical order.
inline constexpr const char* kRegionColumns[] = {"region_id", "a0",      "k0",  "l0",    "l_a",
                                                 "delta_a",   "g_a",     "l_g", "sigma0"};
/// Optional columns, in canonical order.
inline constexpr const char* kRegionOptionalColumns[] = {"g_sigma", "delta_sigma", "delta_k"};

/// Parses a region table. Columns may come in any order; unknown columns,
/// missing required columns, duplicate columns, ragged rows and non-numeric
/// cells are errors (ConfigError with line number). An empty optional cell
/// falls back to `defaults`.
std::vector<RegionParams> parse_region_table(std::string_view text, const RegionDefaults& defaults = {});
std::vector<RegionParams> read_region_table(const std::filesystem::path& path,
                                            const RegionDefaults& defaults = {});

/// Canonical CSV: required columns, then g_sigma, delta_sigma, and delta_k
/// when any region overrides it. Numbers use shortest round-trip form.
std::string format_region_table(const std::vector<RegionParams>& regions);
void write_region_table(const std::vector<RegionParams>& regions, const std::filesystem::path& path);

/// Reads a whole file; throws ConfigError naming the path on failure.
std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes (truncate + write); throws ModelError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace rice
