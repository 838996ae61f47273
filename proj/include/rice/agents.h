#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rice/negotiation.h"
#include "rice/rng.h"
#include "rice/types.h"

namespace rice {

struct PublicFeatures {
    double labor = 0.0;
    double tfp = 0.0;
    double capital = 0.0;
    double sigma = 0.0;
};

/// What a region sees before choosing its activity actions.
///
/// Flattened layout (to_vector), in order:
///   step, climate (t_at, t_lo, m_at, m_up, m_lo),
///   own state (capital, labor, tfp, sigma, balance),
///   per region r: (labor, tfp, capital, sigma),
///   per other region j ascending: incoming proposal (own level, j level) or (-1, -1),
///   per other region j ascending: outgoing proposal (own level, j level) or (-1, -1),
///   per region r: agreed minimum mitigation level,
///   per region r: previous-step compliance flag (1/0).
struct Observation {
    int step = 0;
    int region = 0;
    ClimateState climate;
    RegionState own;
    std::vector<PublicFeatures> regions;
    std::vector<Proposal> incoming;
    std::vector<Proposal> outgoing;
    std::vector<int> agreed_min_level;
    std::vector<bool> compliant;

    std::vector<double> to_vector() const;
};

/// Maps observations (and masks) to actions. One instance per region per episode.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual void reset(std::uint64_t episode_seed) { (void)episode_seed; }
    virtual NegotiationAction negotiate(const NegotiationObservation& obs, const StageSchema& schema,
                                        Rng& rng) = 0;
    virtual ActionSet act(const Observation& obs, const ActionMask& mask, Rng& rng) = 0;

    /// Number of times a requested level was masked out and replaced.
    int mask_substitutions() const { return mask_substitutions_; }

  protected:
    /// `wanted` if allowed, otherwise the nearest allowed level (ties go up).
    int comply(int wanted, const std::vector<bool>& allowed);
    int mask_substitutions_ = 0;
};

/// Constant decisions; all rates must lie on the action grid.
struct ActionTemplate {
    double savings = 0.0;
    double mitigation = 0.0;
    double export_limit = 0.0;
    double tariff = 0.0;
    double import_bid = 0.0;
    double propose_own = 0.0;    // bilateral: promised own mitigation
    double propose_other = 0.0;  // bilateral: requested partner mitigation
    bool accept_proposals = false;
    bool join_club = false;
    double club_mu_min = 0.0;
    double club_tau_min = 0.0;
    bool operator==(const ActionTemplate&) const = default;
};

enum class PolicyKind { ExtremalMin, ExtremalMax, Constant, Random };

struct PolicySpec {
    PolicyKind kind = PolicyKind::ExtremalMin;
    ActionTemplate action;  // Constant; for extremal policies only `savings` is used
    std::optional<std::uint64_t> seed;  // Random
    bool operator==(const PolicySpec&) const = default;

    /// Extremal policies default to 100% savings.
    static PolicySpec extremal_min(double savings = 1.0);
    static PolicySpec extremal_max(double savings = 1.0);
    static PolicySpec constant(const ActionTemplate& action);
    static PolicySpec random(std::optional<std::uint64_t> seed = std::nullopt);
};

/// Parses `extremal_min`, `extremal_max`, `extremal_min(s=1)`,
/// `constant(s=0.2,mu=0.4,px=0,tau=0,bid=0,propose=0.6/0.6,accept=1,join=0,club=0.2/0.1)`,
/// `random` and `random(42)`.
PolicySpec parse_policy_spec(const std::string& text);
std::string to_string(const PolicySpec& spec);

/// mitigation_level is 0 or num_levels - 1; trades nothing, accepts nothing.
std::unique_ptr<Policy> extremal_policy(int mitigation_level, int savings_level, std::size_t num_regions,
                                        int num_levels);
std::unique_ptr<Policy> constant_policy(const ActionTemplate& action, std::size_t region,
                                        std::size_t num_regions, int num_levels);
std::unique_ptr<Policy> random_policy(std::optional<std::uint64_t> seed, std::size_t region,
                                      std::size_t num_regions, int num_levels);

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, std::size_t region, std::size_t num_regions,
                                    int num_levels);

struct Scenario;

struct RankedPolicy {
    double savings = 0.0;
    double mitigation = 0.0;
    double score = 0.0;  // mean over regions of sum_t discount^t r_t
    std::size_t grid_index = 0;
};

/// Runs one rollout per (savings, mitigation) pair with every region playing
/// the same constant policy and returns the pairs sorted by mean discounted
/// utility (descending, stable on grid order).
std::vector<RankedPolicy> grid_search_policies(const Scenario& scenario,
                                               const std::vector<std::pair<double, double>>& grid,
                                               const ProtocolSpec& protocol = {}, std::uint64_t seed = 0);

}  // namespace rice
