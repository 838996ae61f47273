#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rice/agents.h"
#include "rice/negotiation.h"
#include "rice/trade.h"
#include "rice/types.h"

namespace rice {

/// One region in one step. Region-state fields (capital, labor, tfp, sigma)
/// hold the values the step started from; balance and reserve_fund hold the
/// values after the step.
struct RegionStepRecord {
    int step = 0;
    int region = 0;
    ActionSet actions;
    int agreed_min_level = 0;
    bool compliant = true;
    double capital = 0.0;
    double labor = 0.0;
    double tfp = 0.0;
    double sigma = 0.0;
    double theta1 = 0.0;
    double production = 0.0;
    double damage_fraction = 0.0;
    double abatement_fraction = 0.0;
    double gross_output = 0.0;
    double investment = 0.0;
    double emissions = 0.0;
    std::vector<double> imports;  // x_{i,j}: goods received from each exporter j
    std::vector<double> exports;  // x_{j,i}: goods sent to each importer j
    double domestic_consumption = 0.0;
    std::vector<double> foreign_consumption;  // C_{i,j} after tariffs
    double aggregate_consumption = 0.0;
    double utility = 0.0;
    double balance = 0.0;
    double reserve_fund = 0.0;
    bool operator==(const RegionStepRecord&) const = default;
};

/// Global quantities of one step; climate holds the end-of-step state.
struct GlobalStepRecord {
    int step = 0;
    double forcing = 0.0;
    double land_emissions = 0.0;
    double total_emissions = 0.0;
    ClimateState climate;
    bool operator==(const GlobalStepRecord&) const = default;
};

struct NegotiationEntry {
    int step = 0;
    int stage = 0;
    int region = 0;
    std::vector<int> choices;
    bool operator==(const NegotiationEntry&) const = default;
};

struct Diagnostics {
    long damage_clamps = 0;
    long abatement_clamps = 0;
    long consumption_clamps = 0;
    long mask_substitutions = 0;
    Diagnostics& operator+=(const Diagnostics& o);
    bool operator==(const Diagnostics&) const = default;
};

struct RolloutRecord {
    std::uint64_t seed = 0;
    std::string config_hash;
    std::string protocol;
    int num_regions = 0;
    int horizon = 0;
    int delta_years = 5;
    int start_year = 2015;
    double discount = 1.0;
    std::vector<RegionStepRecord> rows;  // step-major, region-minor
    std::vector<GlobalStepRecord> globals;
    std::vector<NegotiationEntry> negotiation;
    Diagnostics diagnostics;
    bool operator==(const RolloutRecord&) const = default;

    const RegionStepRecord& row(int step, int region) const {
        return rows.at(static_cast<std::size_t>(step) * num_regions + region);
    }
};

struct StepOutcome {
    WorldState next;
    std::vector<double> rewards;
    std::vector<RegionStepRecord> rows;
    GlobalStepRecord global;
    TradeFlows flows;
    Diagnostics diagnostics;
};

/// Throws ModelError naming the region and head when an action is not an
/// allowed grid level.
void check_mask_compliance(const std::vector<ActionSet>& actions, const std::vector<ActionMask>& masks,
                           int num_levels);

/// One activity step. When `masks` is given, actions are checked against it
/// first. Throws StateError when any next-state value is not finite.
StepOutcome activity_step(const WorldState& state, const std::vector<ActionSet>& actions,
                          const Scenario& scenario, const std::vector<ActionMask>* masks = nullptr);

/// Full episode with caller-owned protocol and policies.
RolloutRecord run_episode(const Scenario& scenario, Protocol& protocol, bool binding,
                          std::vector<std::unique_ptr<Policy>>& policies, std::uint64_t seed);

RolloutRecord run_episode(const Scenario& scenario, const ProtocolSpec& protocol,
                          const std::vector<PolicySpec>& policies, std::uint64_t seed);

struct EpisodeSummary {
    std::uint64_t seed = 0;
    double final_t_at = 0.0;
    double cumulative_production = 0.0;
    double terminal_production = 0.0;
    double cumulative_consumption = 0.0;
    double cumulative_emissions = 0.0;
    double mean_discounted_utility = 0.0;
};

EpisodeSummary summarize(const RolloutRecord& record);

/// sum_t discount^t r_{i,t} for one region.
double discounted_utility(const RolloutRecord& record, int region);

/// Atmospheric temperature at the end of the step that reaches `year`.
/// Throws std::out_of_range when the year is not covered by the rollout.
double temperature_at_year(const RolloutRecord& record, int year);

struct MetricStats {
    std::string name;
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

struct MonteCarloResult {
    std::vector<EpisodeSummary> episodes;  // in seed order
    std::vector<MetricStats> metrics;
    std::vector<RolloutRecord> rollouts;   // kept only when requested
};

/// Names and accessors of the aggregated metrics, in report order.
const std::vector<std::pair<std::string, double EpisodeSummary::*>>& summary_metrics();

std::vector<MetricStats> aggregate(const std::vector<EpisodeSummary>& episodes);

/// Worker count: `requested` if > 0, else RICE_SIM_THREADS, else hardware concurrency.
unsigned resolve_thread_count(int requested = 0);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Results are
/// returned in index order; the first exception (lowest index) is rethrown.
template <class T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& fn);

MonteCarloResult monte_carlo(const Scenario& scenario, const ProtocolSpec& protocol,
                             const std::vector<PolicySpec>& policies, const std::vector<std::uint64_t>& seeds,
                             int threads = 0, bool keep_rollouts = false);

}  // namespace rice

#include "rice/detail/parallel.h"
