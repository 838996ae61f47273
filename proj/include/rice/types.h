#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rice {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;
using Mat2 = std::array<Vec2, 2>;
using Mat3 = std::array<Vec3, 3>;

/// Which emission formula feeds the carbon cycle.
///  - CarbonEq:  E_i = sigma_i (1 - mu_i) Y_i, land emissions added once globally.
///  - SigmaTEq:  E_i = E_land + sigma_i A_i (1 - mu_i) Y_i, summed over regions.
enum class EmissionsForm { CarbonEq, SigmaTEq };

struct GlobalParams {
    Mat2 phi_t{};  // heat transfer
    Vec2 b_t{};    // forcing weight (xi1, 0)
    Mat3 phi_m{};  // carbon transfer, column j = outflows of reservoir j
    Vec3 b_m{};    // emission weight (xi2, 0, 0)
    double f_2x = 0.0;
    double m_at_1750 = 0.0;
    std::vector<double> f_ex_series;

    double gamma = 0.3;
    double eta = 0.0033;
    double delta_k = 0.1;
    double a1 = 0.0;
    double a2 = 0.0;
    double theta2 = 2.6;
    double p_b = 550.0;
    double delta_pb = 0.025;
    double e_l0 = 0.0;
    double delta_el = 0.0;
    double alpha_util = 1.45;
    double lambda_arm = 0.5;
    double psi_dom = 1.0;
    double psi_for = 1.0;
    double discount = 1.0;
    double interest_rate = 0.10;
    double debt_scale = 10.0;
    int delta_years = 5;
    int horizon = 20;
    int num_action_levels = 10;

    // Labor enters production as L / labor_unit (table population is in millions).
    double labor_unit = 1.0;
    // Aggregate consumption is floored at this value before computing utility.
    double consumption_floor = 0.0;
    EmissionsForm emissions_form = EmissionsForm::CarbonEq;
};

struct RegionParams {
    std::string id;
    double a0 = 0.0;
    double k0 = 0.0;
    double l0 = 0.0;
    double l_a = 0.0;
    double l_g = 0.0;
    double g_a = 0.0;
    double delta_a = 0.0;
    double sigma0 = 0.0;
    double g_sigma = 0.0;
    double delta_sigma = 0.0;
    std::optional<double> delta_k;  // per-region depreciation override
};

struct ClimateState {
    double t_at = 0.0;
    double t_lo = 0.0;
    double m_at = 0.0;
    double m_up = 0.0;
    double m_lo = 0.0;

    Vec2 temperatures() const { return {t_at, t_lo}; }
    Vec3 masses() const { return {m_at, m_up, m_lo}; }
    bool operator==(const ClimateState&) const = default;
};

struct RegionState {
    double capital = 0.0;
    double labor = 0.0;
    double tfp = 0.0;
    double sigma = 0.0;
    double balance = 0.0;
    bool operator==(const RegionState&) const = default;
};

struct WorldState {
    int step = 0;
    ClimateState climate;
    std::vector<RegionState> regions;
    std::vector<double> theta1;
    std::vector<double> reserve_fund;  // cumulative tariff revenue, never re-enters the economy
    bool operator==(const WorldState&) const = default;
};

/// One region's activity-stage decisions. Vectors are indexed by the other
/// region's index; the self entry is always 0.
struct ActionSet {
    double savings = 0.0;
    double mitigation = 0.0;
    double export_limit = 0.0;
    std::vector<double> tariffs;
    // Desired imports from each region as a fraction of the importer's gross output.
    std::vector<double> import_bids;
    bool operator==(const ActionSet&) const = default;
};

/// Activity-stage action heads, in mask order: savings, mitigation, export
/// limit, then one tariff head and one import-bid head per region.
struct ActionMask {
    std::vector<bool> savings;
    std::vector<bool> mitigation;
    std::vector<bool> export_limit;
    std::vector<std::vector<bool>> tariffs;
    std::vector<std::vector<bool>> import_bids;

    static ActionMask all_allowed(std::size_t num_regions, int num_levels);
    bool operator==(const ActionMask&) const = default;
};

struct Scenario {
    GlobalParams global;
    std::vector<RegionParams> regions;
    ClimateState initial_climate;
    int start_year = 2015;
};

/// Grid helpers for discrete rate actions.
double level_to_rate(int level, int num_levels);
/// Returns the grid level for `rate`, or nullopt when rate is not on the grid.
std::optional<int> rate_to_level(double rate, int num_levels);
/// Nearest grid level, ties rounding up.
int nearest_level(double rate, int num_levels);

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A state update produced an invalid value (negative reservoir, NaN, ...).
class StateError : public ModelError {
  public:
    using ModelError::ModelError;
};

class ConfigError : public ModelError {
  public:
    using ModelError::ModelError;
};

}  // namespace rice
