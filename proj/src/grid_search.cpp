#include <algorithm>

#include "rice/agents.h"
#include "rice/engine.h"

namespace rice {

std::vector<RankedPolicy> grid_search_policies(const Scenario& scenario,
                                               const std::vector<std::pair<double, double>>& grid,
                                               const ProtocolSpec& protocol, std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("grid search needs at least one (savings, mitigation) pair");
    std::vector<RankedPolicy> ranked;
    ranked.reserve(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        ActionTemplate action;
        action.savings = grid[k].first;
        action.mitigation = grid[k].second;
        const auto record = run_episode(scenario, protocol, {PolicySpec::constant(action)}, seed);
        ranked.push_back({grid[k].first, grid[k].second, summarize(record).mean_discounted_utility, k});
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedPolicy& a, const RankedPolicy& b) { return a.score > b.score; });
    return ranked;
}

}  // namespace rice
