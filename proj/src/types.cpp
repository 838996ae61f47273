#include "rice/types.h"

#include <cmath>

namespace rice {

ActionMask ActionMask::all_allowed(std::size_t num_regions, int num_levels) {
    const std::vector<bool> all(static_cast<std::size_t>(num_levels), true);
    ActionMask m;
    m.savings = all;
    m.mitigation = all;
    m.export_limit = all;
    m.tariffs.assign(num_regions, all);
    m.import_bids.assign(num_regions, all);
    return m;
}

double level_to_rate(int level, int num_levels) {
    if (level == num_levels - 1) return 1.0;
    return static_cast<double>(level) / static_cast<double>(num_levels - 1);
}

std::optional<int> rate_to_level(double rate, int num_levels) {
    if (!std::isfinite(rate) || rate < -1e-12 || rate > 1.0 + 1e-12) return std::nullopt;
    const int level = static_cast<int>(std::lround(rate * (num_levels - 1)));
    if (std::abs(level_to_rate(level, num_levels) - rate) > 1e-12) return std::nullopt;
    return level;
}

int nearest_level(double rate, int num_levels) {
    const double scaled = rate * (num_levels - 1);
    int level = static_cast<int>(std::floor(scaled + 0.5));
    if (level < 0) level = 0;
    if (level > num_levels - 1) level = num_levels - 1;
    return level;
}

}  // namespace rice
