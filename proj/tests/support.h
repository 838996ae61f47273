// Shared fixtures and independent oracles for the unit and acceptance tests.
// Nothing in the oracle section calls into the library's model functions.
#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "rice/config_io.h"
#include "rice/scenario.h"
#include "rice/types.h"

namespace rice::testing {

inline std::filesystem::path source_dir() { return RICE_SOURCE_DIR; }

inline Scenario default_scenario() {
    return make_scenario(load_scenario(source_dir() / "configs" / "default.toml").scenario);
}

inline GlobalParams identity_globals(int horizon = 5) {
    GlobalParams g;
    g.phi_t = {{{1.0, 0.0}, {0.0, 1.0}}};
    g.b_t = {0.0, 0.0};
    g.phi_m = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    g.b_m = {0.0, 0.0, 0.0};
    g.f_2x = 3.6813;
    g.m_at_1750 = 588.0;
    g.f_ex_series.assign(static_cast<std::size_t>(horizon), 0.0);
    g.delta_k = 0.0;
    g.e_l0 = 0.0;
    g.delta_el = 0.1;
    g.discount = 0.95;
    g.horizon = horizon;
    return g;
}

inline RegionParams simple_region(const std::string& id) {
    RegionParams r;
    r.id = id;
    r.a0 = 2.0;
    r.k0 = 1.5;
    r.l0 = 300.0;
    r.l_a = 400.0;
    r.l_g = 0.03;
    r.g_a = 0.1;
    r.delta_a = 0.15;
    r.sigma0 = 0.5;
    r.g_sigma = 0.0152;
    r.delta_sigma = 0.001;
    return r;
}

inline Scenario small_scenario(std::size_t n, int horizon = 5) {
    Scenario sc;
    sc.global = identity_globals(horizon);
    sc.global.phi_t = {{{0.8718, 0.008844}, {0.025, 0.975}}};
    sc.global.b_t = {0.1005, 0.0};
    sc.global.phi_m = {{{0.88, 0.196, 0.0}, {0.12, 0.797, 0.001465}, {0.0, 0.007, 0.998535}}};
    sc.global.b_m = {5.0 / 3.666, 0.0, 0.0};
    sc.global.delta_k = 0.1;
    sc.global.a2 = 0.00236;
    sc.global.e_l0 = 2.6;
    sc.global.delta_el = 0.115;
    sc.global.labor_unit = 1000.0;
    sc.global.consumption_floor = 1e-6;
    for (std::size_t i = 0; i < n; ++i) sc.regions.push_back(simple_region("r" + std::to_string(i + 1)));
    sc.initial_climate = {0.85, 0.0068, 851.0, 460.0, 1740.0};
    return make_scenario(sc);
}

inline ActionSet zero_actions(std::size_t n) {
    ActionSet a;
    a.tariffs.assign(n, 0.0);
    a.import_bids.assign(n, 0.0);
    return a;
}

inline bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// ---- straight-line transcription of one activity step --------------------

struct OracleStep {
    WorldState next;
    std::vector<double> theta1, damage, abatement, production, gross, investment, emissions;
    std::vector<double> domestic, aggregate, utility, balance, reserve;
    std::vector<std::vector<double>> imports;      // [i][j]: goods from j received by i
    std::vector<std::vector<double>> consumption;  // tariffed C_{i,j}
    double forcing = 0.0;
    double total_emissions = 0.0;
};

inline OracleStep oracle_step(const WorldState& s, const std::vector<ActionSet>& act, const Scenario& sc) {
    const GlobalParams& g = sc.global;
    const std::size_t n = sc.regions.size();
    const int t = s.step + 1;
    const double dy = g.delta_years;
    OracleStep o;
    o.theta1.resize(n);
    o.damage.resize(n);
    o.abatement.resize(n);
    o.production.resize(n);
    o.gross.resize(n);
    o.investment.resize(n);
    o.emissions.resize(n);
    o.domestic.resize(n);
    o.aggregate.resize(n);
    o.utility.resize(n);
    o.balance.resize(n);
    o.reserve.resize(n);
    std::vector<double> d_after_interest(n);

    // theta1, damages, abatement, Y, Q, interest, investment
    for (std::size_t i = 0; i < n; ++i) {
        const RegionState& r = s.regions[i];
        o.theta1[i] = g.p_b / (1000.0 * g.theta2) * std::pow(1.0 - g.delta_pb, t - 1) * r.sigma;
        double dmg = 1.0 - g.a1 * s.climate.t_at - g.a2 * s.climate.t_at * s.climate.t_at;
        if (dmg < 0.0) dmg = 0.0;
        double ab = 1.0 - o.theta1[i] * std::pow(act[i].mitigation, g.theta2);
        if (ab < 0.0) ab = 0.0;
        o.damage[i] = dmg;
        o.abatement[i] = ab;
        o.production[i] = r.tfp * std::pow(r.capital, g.gamma) * std::pow(r.labor / g.labor_unit, 1.0 - g.gamma);
        o.gross[i] = dmg * ab * o.production[i];
        d_after_interest[i] = r.balance * (1.0 + g.interest_rate);
        o.investment[i] = o.gross[i] * act[i].savings;
    }

    // bids: fraction of own Q, capped at Q, then debt ratio
    std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) b[i][j] = act[i].import_bids[j] * o.gross[i];
            sum += b[i][j];
        }
        if (sum > o.gross[i] && sum > 0.0)
            for (std::size_t j = 0; j < n; ++j) b[i][j] *= o.gross[i] / sum;
        const double ratio = g.debt_scale * d_after_interest[i] / sc.regions[i].k0;
        for (std::size_t j = 0; j < n; ++j) b[i][j] = std::max(0.0, b[i][j] * (1.0 + ratio));
    }

    // export caps per exporter column
    o.imports.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        double xmax = std::min(act[j].export_limit * o.gross[j], o.gross[j] - o.investment[j]);
        if (xmax < 0.0) xmax = 0.0;
        double demand = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) demand += b[i][j];
        const double f = (demand > 0.0 && xmax < demand) ? xmax / demand : 1.0;
        for (std::size_t i = 0; i < n; ++i) o.imports[i][j] = i == j ? 0.0 : b[i][j] * f;
    }

    // tariffs, domestic consumption, Armington, utility, balance, reserve
    o.consumption.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        double revenue = 0.0;
        double imported = 0.0;
        double exported = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            o.consumption[i][j] = o.imports[i][j] * (1.0 - act[i].tariffs[j]);
            revenue += o.imports[i][j] * act[i].tariffs[j];
            imported += o.imports[i][j];
            exported += o.imports[j][i];
        }
        double dom = (1.0 - act[i].savings) * o.gross[i] - exported;
        if (dom < 0.0) dom = 0.0;
        o.domestic[i] = dom;
        double inner = g.psi_dom * std::pow(dom, g.lambda_arm);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) inner += g.psi_for * std::pow(o.consumption[i][j], g.lambda_arm);
        double c = std::pow(inner, 1.0 / g.lambda_arm);
        if (c < g.consumption_floor) c = g.consumption_floor;
        o.aggregate[i] = c;
        const double l = s.regions[i].labor / g.labor_unit;
        o.utility[i] = l / (1.0 - g.alpha_util) * std::pow(c / l, 1.0 - g.alpha_util);
        o.balance[i] = d_after_interest[i] + dy * (exported - imported);
        o.reserve[i] = s.reserve_fund[i] + revenue;
    }

    // temperature from the carbon mass the step started with
    const double fex = g.f_ex_series[static_cast<std::size_t>(s.step)];
    o.forcing = g.f_2x * std::log(s.climate.m_at / g.m_at_1750) / std::log(2.0) + fex;
    const double tat = g.phi_t[0][0] * s.climate.t_at + g.phi_t[0][1] * s.climate.t_lo + g.b_t[0] * o.forcing;
    const double tlo = g.phi_t[1][0] * s.climate.t_at + g.phi_t[1][1] * s.climate.t_lo + g.b_t[1] * o.forcing;

    const double land = g.e_l0 * std::pow(1.0 - g.delta_el, t - 1);
    double etot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const RegionState& r = s.regions[i];
        if (g.emissions_form == EmissionsForm::CarbonEq) {
            o.emissions[i] = r.sigma * (1.0 - act[i].mitigation) * o.production[i];
        } else {
            o.emissions[i] = land + r.sigma * r.tfp * (1.0 - act[i].mitigation) * o.production[i];
        }
        etot += o.emissions[i];
    }
    if (g.emissions_form == EmissionsForm::CarbonEq) etot += land;
    o.total_emissions = etot;
    const double m[3] = {s.climate.m_at, s.climate.m_up, s.climate.m_lo};
    double mn[3];
    for (int k = 0; k < 3; ++k)
        mn[k] = g.phi_m[k][0] * m[0] + g.phi_m[k][1] * m[1] + g.phi_m[k][2] * m[2] + g.b_m[k] * etot;

    o.next.step = s.step + 1;
    o.next.climate = {tat, tlo, mn[0], mn[1], mn[2]};
    o.next.regions.resize(n);
    o.next.theta1.resize(n);
    o.next.reserve_fund = o.reserve;
    for (std::size_t i = 0; i < n; ++i) {
        const RegionParams& p = sc.regions[i];
        const RegionState& r = s.regions[i];
        RegionState& nr = o.next.regions[i];
        const double dk = p.delta_k ? *p.delta_k : g.delta_k;
        nr.capital = std::pow(1.0 - dk, dy) * r.capital + dy * o.gross[i] * act[i].savings;
        nr.labor = r.labor * std::pow((1.0 + p.l_a) / (1.0 + r.labor), p.l_g);
        nr.tfp = (std::exp(g.eta) + p.g_a * std::exp(-p.delta_a * dy * (t - 1))) * r.tfp;
        nr.sigma = r.sigma * std::exp(-p.g_sigma * std::pow(1.0 - p.delta_sigma, dy * (t - 1)) * dy);
        nr.balance = o.balance[i];
        o.next.theta1[i] = g.p_b / (1000.0 * g.theta2) * std::pow(1.0 - g.delta_pb, t) * nr.sigma;
    }
    return o;
}

// ---- random scenario / state / action generators -------------------------

struct RandomCase {
    Scenario scenario;
    WorldState state;
    std::vector<ActionSet> actions;
};

inline RandomCase random_case(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto in = [&](double lo, double hi) { return lo + (hi - lo) * u(gen); };
    RandomCase c;
    const std::size_t n = 1 + gen() % 5;
    Scenario& sc = c.scenario;
    GlobalParams& g = sc.global;
    g.phi_t = {{{in(0.7, 0.95), in(0.0, 0.02)}, {in(0.0, 0.05), in(0.9, 1.0)}}};
    g.b_t = {in(0.05, 0.2), 0.0};
    const double a = in(0.05, 0.2), b = in(0.1, 0.3), cc = in(0.0, 0.01);
    g.phi_m = {{{1 - a, b, 0.0}, {a, 1 - b - cc, in(0.0, 0.002)}, {0.0, cc, in(0.99, 1.0)}}};
    g.b_m = {in(0.5, 2.0), 0.0, 0.0};
    g.f_2x = in(3.0, 4.0);
    g.m_at_1750 = in(500, 650);
    g.horizon = 20;
    for (int k = 0; k < 20; ++k) g.f_ex_series.push_back(in(0.0, 1.0));
    g.gamma = in(0.2, 0.4);
    g.eta = in(0.0, 0.01);
    g.delta_k = in(0.05, 0.15);
    g.a1 = in(0.0, 0.01);
    g.a2 = u(gen) < 0.2 ? in(0.05, 0.2) : in(0.0, 0.005);  // sometimes damages exceed 100%
    g.theta2 = in(1.5, 3.0);
    g.p_b = u(gen) < 0.2 ? in(5000, 20000) : in(300, 800);  // sometimes abatement exceeds 100%
    g.delta_pb = in(0.0, 0.05);
    g.e_l0 = in(0.0, 3.0);
    g.delta_el = in(0.05, 0.2);
    g.alpha_util = in(1.1, 2.0);
    g.lambda_arm = in(0.2, 1.0);
    g.psi_dom = in(0.5, 1.5);
    g.psi_for = in(0.5, 1.5);
    g.discount = in(0.9, 1.0);
    g.interest_rate = in(0.0, 0.2);
    g.debt_scale = in(1.0, 20.0);
    g.delta_years = 1 + static_cast<int>(gen() % 5);
    g.num_action_levels = 2 + static_cast<int>(gen() % 10);
    g.labor_unit = u(gen) < 0.5 ? 1.0 : 1000.0;
    g.consumption_floor = 1e-9;
    g.emissions_form = u(gen) < 0.5 ? EmissionsForm::CarbonEq : EmissionsForm::SigmaTEq;
    for (std::size_t i = 0; i < n; ++i) {
        RegionParams r;
        r.id = "r" + std::to_string(i);
        r.a0 = in(0.5, 30);
        r.k0 = in(0.05, 20);
        r.l0 = in(20, 1500);
        r.l_a = in(20, 2000);
        r.l_g = in(-0.1, 0.1);
        r.g_a = in(0.0, 0.5);
        r.delta_a = in(0.005, 2.0);
        r.sigma0 = in(0.1, 1.7);
        r.g_sigma = in(0.0, 0.03);
        r.delta_sigma = in(0.0, 0.01);
        if (u(gen) < 0.3) r.delta_k = in(0.05, 0.15);
        sc.regions.push_back(r);
    }
    sc.initial_climate = {in(0.0, 3.0), in(0.0, 0.5), in(600, 1200), in(300, 700), in(1500, 2000)};
    sc = make_scenario(sc);

    WorldState& s = c.state;
    s.step = static_cast<int>(gen() % 20);
    s.climate = {in(0.0, 6.0), in(0.0, 1.0), in(600, 1500), in(300, 800), in(1500, 2000)};
    for (std::size_t i = 0; i < n; ++i) {
        RegionState r;
        r.capital = u(gen) < 0.05 ? 0.0 : in(0.01, 30);
        r.labor = in(10, 2000);
        r.tfp = in(0.5, 40);
        r.sigma = in(0.05, 1.7);
        r.balance = in(-2.0, 2.0) * sc.regions[i].k0 / g.debt_scale;
        s.regions.push_back(r);
        s.theta1.push_back(0.0);
        s.reserve_fund.push_back(in(0.0, 5.0));
    }
    const int levels = g.num_action_levels;
    const auto level = [&] { return static_cast<double>(gen() % levels) / (levels - 1); };
    for (std::size_t i = 0; i < n; ++i) {
        ActionSet a = zero_actions(n);
        a.savings = level();
        a.mitigation = level();
        a.export_limit = level();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            a.tariffs[j] = level();
            a.import_bids[j] = level();
        }
        c.actions.push_back(a);
    }
    return c;
}

}  // namespace rice::testing
