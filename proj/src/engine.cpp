#include "rice/engine.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "rice/climate.h"
#include "rice/config_io.h"
#include "rice/economy.h"
#include "rice/scenario.h"

namespace rice {

Diagnostics& Diagnostics::operator+=(const Diagnostics& o) {
    damage_clamps += o.damage_clamps;
    abatement_clamps += o.abatement_clamps;
    consumption_clamps += o.consumption_clamps;
    mask_substitutions += o.mask_substitutions;
    return *this;
}

namespace {

void check_head(double rate, const std::vector<bool>& allowed, int levels, std::size_t region,
                const std::string& head) {
    const auto level = rate_to_level(rate, levels);
    if (!level || *level >= static_cast<int>(allowed.size()) || !allowed[static_cast<std::size_t>(*level)]) {
        std::ostringstream msg;
        msg << "mask violation: region " << region << " head " << head << " value " << rate;
        msg << (level ? " is masked out" : " is not on the action grid");
        throw ModelError(msg.str());
    }
}

std::string dump_state(const WorldState& s) {
    std::ostringstream out;
    out.precision(17);
    out << "step " << s.step << ": t_at=" << s.climate.t_at << " t_lo=" << s.climate.t_lo
        << " m_at=" << s.climate.m_at << " m_up=" << s.climate.m_up << " m_lo=" << s.climate.m_lo;
    for (std::size_t i = 0; i < s.regions.size(); ++i) {
        const auto& r = s.regions[i];
        out << "\n  region " << i << ": K=" << r.capital << " L=" << r.labor << " A=" << r.tfp
            << " sigma=" << r.sigma << " D=" << r.balance << " theta1=" << s.theta1[i];
    }
    return out.str();
}

void check_finite(const WorldState& next) {
    const auto bad = [&](const char* field, double v, long region) {
        std::ostringstream msg;
        msg << "non-finite state: " << field;
        if (region >= 0) msg << " of region " << region;
        msg << " = " << v << "\n" << dump_state(next);
        throw StateError(msg.str());
    };
    const auto& c = next.climate;
    const std::pair<const char*, double> climate_fields[] = {
        {"t_at", c.t_at}, {"t_lo", c.t_lo}, {"m_at", c.m_at}, {"m_up", c.m_up}, {"m_lo", c.m_lo}};
    for (const auto& [name, v] : climate_fields)
        if (!std::isfinite(v)) bad(name, v, -1);
    for (std::size_t i = 0; i < next.regions.size(); ++i) {
        const auto& r = next.regions[i];
        const std::pair<const char*, double> fields[] = {{"capital", r.capital}, {"labor", r.labor},
                                                         {"tfp", r.tfp},         {"sigma", r.sigma},
                                                         {"balance", r.balance}, {"theta1", next.theta1[i]},
                                                         {"reserve_fund", next.reserve_fund[i]}};
        for (const auto& [name, v] : fields)
            if (!std::isfinite(v)) bad(name, v, static_cast<long>(i));
    }
}

}  // namespace

void check_mask_compliance(const std::vector<ActionSet>& actions, const std::vector<ActionMask>& masks,
                           int levels) {
    const std::size_t n = actions.size();
    if (masks.size() != n) throw ModelError("mask count does not match region count");
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = actions[i];
        const auto& m = masks[i];
        if (a.tariffs.size() != n || a.import_bids.size() != n) {
            throw ModelError("region " + std::to_string(i) + ": tariff/import-bid vectors must have " +
                             std::to_string(n) + " entries");
        }
        check_head(a.savings, m.savings, levels, i, "savings");
        check_head(a.mitigation, m.mitigation, levels, i, "mitigation");
        check_head(a.export_limit, m.export_limit, levels, i, "export_limit");
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) {
                if (a.tariffs[j] != 0.0 || a.import_bids[j] != 0.0)
                    throw ModelError("mask violation: region " + std::to_string(i) + " self tariff/bid must be 0");
                continue;
            }
            check_head(a.tariffs[j], m.tariffs[j], levels, i, "tariff[" + std::to_string(j) + "]");
            check_head(a.import_bids[j], m.import_bids[j], levels, i, "import_bid[" + std::to_string(j) + "]");
        }
    }
}

StepOutcome activity_step(const WorldState& state, const std::vector<ActionSet>& actions,
                          const Scenario& scenario, const std::vector<ActionMask>* masks) {
    const auto& g = scenario.global;
    const std::size_t n = scenario.regions.size();
    if (state.regions.size() != n || actions.size() != n)
        throw ModelError("activity_step: state/actions do not match the region count");
    if (masks) check_mask_compliance(actions, *masks, g.num_action_levels);
    for (std::size_t i = 0; i < n; ++i)
        if (actions[i].tariffs.size() != n || actions[i].import_bids.size() != n)
            throw ModelError("region " + std::to_string(i) + ": tariff/import-bid vectors have wrong size");

    const int t = state.step + 1;
    StepOutcome out;
    out.rows.resize(n);
    std::vector<double> y(n), q(n), inv(n), balance(n), theta1(n);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = state.regions[i];
        const auto& a = actions[i];
        auto& row = out.rows[i];
        row.step = state.step;
        row.region = static_cast<int>(i);
        row.actions = a;
        row.capital = r.capital;
        row.labor = r.labor;
        row.tfp = r.tfp;
        row.sigma = r.sigma;

        theta1[i] = mitigation_cost_coeff(r.sigma, t, g);
        double dmg = damage_fraction(state.climate.t_at, g.a1, g.a2);
        if (dmg < 0.0) {
            dmg = 0.0;
            ++out.diagnostics.damage_clamps;
        }
        double abate = abatement_fraction(theta1[i], a.mitigation, g.theta2);
        if (abate < 0.0) {
            abate = 0.0;
            ++out.diagnostics.abatement_clamps;
        }
        y[i] = production(r.tfp, r.capital, r.labor / g.labor_unit, g.gamma);
        q[i] = gross_output(dmg, abate, y[i]);
        balance[i] = trade::accrue_interest(r.balance, g.interest_rate);
        inv[i] = q[i] * a.savings;

        row.theta1 = theta1[i];
        row.damage_fraction = dmg;
        row.abatement_fraction = abate;
        row.production = y[i];
        row.gross_output = q[i];
        row.investment = inv[i];
    }

    auto& flows = out.flows;
    flows.bids = SquareMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> bids(n);
        for (std::size_t j = 0; j < n; ++j) bids[j] = j == i ? 0.0 : actions[i].import_bids[j] * q[i];
        bids = trade::scale_bids_to_output(bids, q[i]);
        bids = trade::apply_debt_scaling(bids, balance[i], scenario.regions[i].k0, g.debt_scale);
        std::copy(bids.begin(), bids.end(), flows.bids.row(i).begin());
    }
    std::vector<double> export_limit(n);
    for (std::size_t i = 0; i < n; ++i) export_limit[i] = actions[i].export_limit;
    flows.imports = trade::cap_exports(flows.bids, q, inv, export_limit);

    flows.consumption = SquareMatrix(n);
    flows.tariff_revenue.assign(n, 0.0);
    flows.export_totals.assign(n, 0.0);
    flows.import_totals.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const auto goods = trade::tariff_consumption(flows.imports(i, j), actions[i].tariffs[j]);
            flows.consumption(i, j) = goods.consumed;
            flows.tariff_revenue[i] += goods.revenue;
        }
        flows.import_totals[i] = flows.imports.row_sum(i);
        flows.export_totals[i] = flows.imports.col_sum(i);
    }

    out.next.step = state.step + 1;
    out.next.regions.resize(n);
    out.next.theta1.resize(n);
    out.next.reserve_fund.resize(n);
    out.rewards.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& row = out.rows[i];
        double dom = trade::domestic_consumption_raw(q[i], actions[i].savings, flows.export_totals[i]);
        if (dom < 0.0) {
            dom = 0.0;
            ++out.diagnostics.consumption_clamps;
        }
        std::vector<double> foreign;
        foreign.reserve(n - 1);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) foreign.push_back(flows.consumption(i, j));
        const double c = std::max(trade::aggregate_consumption(dom, foreign, g), g.consumption_floor);
        const double r = trade::utility(state.regions[i].labor / g.labor_unit, c, g.alpha_util);

        row.imports.assign(flows.imports.row(i).begin(), flows.imports.row(i).end());
        row.exports.resize(n);
        for (std::size_t j = 0; j < n; ++j) row.exports[j] = flows.imports(j, i);
        row.domestic_consumption = dom;
        row.foreign_consumption.assign(flows.consumption.row(i).begin(), flows.consumption.row(i).end());
        row.aggregate_consumption = c;
        row.utility = r;
        out.rewards[i] = r;

        row.balance = trade::update_balance(balance[i], flows.import_totals[i], flows.export_totals[i],
                                            g.delta_years);
        row.reserve_fund = state.reserve_fund[i] + flows.tariff_revenue[i];
        out.next.regions[i].balance = row.balance;
        out.next.reserve_fund[i] = row.reserve_fund;
    }

    // Temperature responds to the carbon mass the step started from.
    const double f_ex = static_cast<std::size_t>(state.step) < g.f_ex_series.size()
                            ? g.f_ex_series[static_cast<std::size_t>(state.step)]
                            : 0.0;
    const double forcing = climate::radiative_forcing(state.climate.m_at, f_ex, g);
    const Vec2 temps = climate::step_temperature(state.climate.temperatures(), forcing, g);

    const double e_land = climate::land_emissions(t, g);
    double e_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double mu = actions[i].mitigation;
        const double sigma = state.regions[i].sigma;
        double e = 0.0;
        if (g.emissions_form == EmissionsForm::CarbonEq) {
            e = sigma * (1.0 - mu) * y[i];
        } else {
            e = e_land + sigma * state.regions[i].tfp * (1.0 - mu) * y[i];
        }
        out.rows[i].emissions = e;
        e_total += e;
    }
    if (g.emissions_form == EmissionsForm::CarbonEq) e_total += e_land;
    const Vec3 masses = climate::step_carbon(state.climate.masses(), e_total, g);

    out.next.climate = {temps[0], temps[1], masses[0], masses[1], masses[2]};
    out.global = {state.step, forcing, e_land, e_total, out.next.climate};

    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = scenario.regions[i];
        const auto& r = state.regions[i];
        auto& nr = out.next.regions[i];
        nr.capital = step_capital(r.capital, q[i], actions[i].savings, p.delta_k.value_or(g.delta_k), g.delta_years);
        nr.labor = step_population(r.labor, p);
        nr.tfp = step_technology(r.tfp, t, p, g);
        nr.sigma = step_carbon_intensity(r.sigma, t, p, g.delta_years);
        out.next.theta1[i] = mitigation_cost_coeff(nr.sigma, t + 1, g);
    }
    check_finite(out.next);
    return out;
}

RolloutRecord run_episode(const Scenario& scenario, Protocol& protocol, bool binding,
                          std::vector<std::unique_ptr<Policy>>& policies, std::uint64_t seed) {
    const auto& g = scenario.global;
    const std::size_t n = scenario.regions.size();
    const int levels = g.num_action_levels;
    if (policies.size() != n) {
        throw ConfigError("expected " + std::to_string(n) + " policies, got " + std::to_string(policies.size()));
    }

    RolloutRecord rec;
    rec.seed = seed;
    rec.config_hash = config_hash(scenario);
    rec.protocol = protocol.name();
    rec.num_regions = static_cast<int>(n);
    rec.horizon = g.horizon;
    rec.delta_years = g.delta_years;
    rec.start_year = scenario.start_year;
    rec.discount = g.discount;
    rec.rows.reserve(n * static_cast<std::size_t>(g.horizon));

    EpisodeRng rng(seed, n);
    for (auto& p : policies) p->reset(seed);
    const std::vector<int> base_subs = [&] {
        std::vector<int> v;
        for (const auto& p : policies) v.push_back(p->mask_substitutions());
        return v;
    }();

    WorldState state = initial_state(scenario);
    std::vector<bool> compliant(n, true);
    const auto all_allowed = std::vector<ActionMask>(n, ActionMask::all_allowed(n, levels));

    for (int step = 0; step < g.horizon; ++step) {
        protocol.begin_step(step, rng.protocol());
        for (int stage = 0; stage < protocol.num_stages(); ++stage) {
            std::vector<NegotiationAction> stage_actions(n);
            for (std::size_t i = 0; i < n; ++i) {
                const int region = static_cast<int>(i);
                stage_actions[i] = policies[i]->negotiate(protocol.observe(stage, region),
                                                          protocol.schema(stage, region), rng.region(i));
            }
            protocol.submit(stage, stage_actions);
            for (std::size_t i = 0; i < n; ++i)
                rec.negotiation.push_back({step, stage, static_cast<int>(i), stage_actions[i].choices});
        }
        const AgreementState agreements = protocol.resolve();
        const std::vector<ActionMask> masks = build_masks(agreements, n, levels);
        const auto& given_masks = binding ? masks : all_allowed;

        std::vector<ActionSet> actions(n);
        for (std::size_t i = 0; i < n; ++i) {
            Observation obs;
            obs.step = step;
            obs.region = static_cast<int>(i);
            obs.climate = state.climate;
            obs.own = state.regions[i];
            for (const auto& r : state.regions) obs.regions.push_back({r.labor, r.tfp, r.capital, r.sigma});
            if (protocol.num_stages() > 0) {
                const auto nobs = protocol.observe(protocol.num_stages() - 1, static_cast<int>(i));
                obs.incoming = nobs.incoming;
                obs.outgoing = nobs.outgoing;
            }
            obs.agreed_min_level = agreements.min_mitigation_level;
            obs.compliant = compliant;
            actions[i] = policies[i]->act(obs, given_masks[i], rng.region(i));
        }
        check_mask_compliance(actions, given_masks, levels);
        for (std::size_t i = 0; i < n; ++i) {
            const int chosen = rate_to_level(actions[i].mitigation, levels).value_or(0);
            compliant[i] = chosen >= agreements.min_mitigation_level.at(i);
        }
        protocol.apply_overrides(actions);

        StepOutcome outcome = activity_step(state, actions, scenario);
        for (std::size_t i = 0; i < n; ++i) {
            outcome.rows[i].agreed_min_level = agreements.min_mitigation_level.at(i);
            outcome.rows[i].compliant = compliant[i];
            rec.rows.push_back(std::move(outcome.rows[i]));
        }
        rec.globals.push_back(outcome.global);
        rec.diagnostics += outcome.diagnostics;
        state = std::move(outcome.next);
    }
    for (std::size_t i = 0; i < n; ++i)
        rec.diagnostics.mask_substitutions += policies[i]->mask_substitutions() - base_subs[i];
    return rec;
}

RolloutRecord run_episode(const Scenario& scenario, const ProtocolSpec& spec,
                          const std::vector<PolicySpec>& specs, std::uint64_t seed) {
    const std::size_t n = scenario.regions.size();
    const int levels = scenario.global.num_action_levels;
    if (specs.size() != n && specs.size() != 1) {
        throw ConfigError("expected 1 or " + std::to_string(n) + " policy specs, got " +
                          std::to_string(specs.size()));
    }
    auto protocol = make_protocol(spec, n, levels);
    std::vector<std::unique_ptr<Policy>> policies;
    for (std::size_t i = 0; i < n; ++i) policies.push_back(make_policy(specs[specs.size() == 1 ? 0 : i], i, n, levels));
    return run_episode(scenario, *protocol, spec.binding, policies, seed);
}

double discounted_utility(const RolloutRecord& record, int region) {
    double total = 0.0;
    double w = 1.0;
    for (int step = 0; step < record.horizon; ++step) {
        total += w * record.row(step, region).utility;
        w *= record.discount;
    }
    return total;
}

EpisodeSummary summarize(const RolloutRecord& record) {
    EpisodeSummary s;
    s.seed = record.seed;
    if (!record.globals.empty()) s.final_t_at = record.globals.back().climate.t_at;
    for (const auto& row : record.rows) {
        s.cumulative_production += row.production;
        s.cumulative_consumption += row.aggregate_consumption;
        if (row.step == record.horizon - 1) s.terminal_production += row.production;
    }
    for (const auto& gs : record.globals) s.cumulative_emissions += gs.total_emissions;
    double u = 0.0;
    for (int i = 0; i < record.num_regions; ++i) u += discounted_utility(record, i);
    if (record.num_regions > 0) s.mean_discounted_utility = u / record.num_regions;
    return s;
}

double temperature_at_year(const RolloutRecord& record, int year) {
    // The step starting at start_year + k*Delta ends at start_year + (k+1)*Delta.
    const int offset = year - record.start_year;
    if (record.delta_years <= 0 || offset <= 0 || offset % record.delta_years != 0)
        throw std::out_of_range("year " + std::to_string(year) + " is not a step boundary of the rollout");
    const auto step = static_cast<std::size_t>(offset / record.delta_years - 1);
    if (step >= record.globals.size())
        throw std::out_of_range("year " + std::to_string(year) + " is beyond the rollout horizon");
    return record.globals[step].climate.t_at;
}

const std::vector<std::pair<std::string, double EpisodeSummary::*>>& summary_metrics() {
    static const std::vector<std::pair<std::string, double EpisodeSummary::*>> metrics = {
        {"final_t_at", &EpisodeSummary::final_t_at},
        {"cumulative_production", &EpisodeSummary::cumulative_production},
        {"terminal_production", &EpisodeSummary::terminal_production},
        {"cumulative_consumption", &EpisodeSummary::cumulative_consumption},
        {"cumulative_emissions", &EpisodeSummary::cumulative_emissions},
        {"mean_discounted_utility", &EpisodeSummary::mean_discounted_utility},
    };
    return metrics;
}

std::vector<MetricStats> aggregate(const std::vector<EpisodeSummary>& episodes) {
    std::vector<MetricStats> out;
    for (const auto& [name, field] : summary_metrics()) {
        // Welford: identical samples give a spread of exactly zero.
        double mean = 0.0;
        double m2 = 0.0;
        std::size_t k = 0;
        for (const auto& e : episodes) {
            const double x = e.*field;
            ++k;
            const double d = x - mean;
            mean += d / static_cast<double>(k);
            m2 += d * (x - mean);
        }
        out.push_back({name, mean, k ? std::sqrt(m2 / static_cast<double>(k)) : 0.0});
    }
    return out;
}

unsigned resolve_thread_count(int requested) {
    if (requested > 0) return static_cast<unsigned>(requested);
    if (const char* env = std::getenv("RICE_SIM_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

MonteCarloResult monte_carlo(const Scenario& scenario, const ProtocolSpec& protocol,
                             const std::vector<PolicySpec>& policies, const std::vector<std::uint64_t>& seeds,
                             int threads, bool keep_rollouts) {
    if (seeds.empty()) throw ConfigError("monte_carlo needs at least one seed");
    auto records = parallel_map<RolloutRecord>(seeds.size(), resolve_thread_count(threads),
                                               [&](std::size_t k) {
                                                   return run_episode(scenario, protocol, policies, seeds[k]);
                                               });
    MonteCarloResult result;
    for (const auto& r : records) result.episodes.push_back(summarize(r));
    result.metrics = aggregate(result.episodes);
    if (keep_rollouts) result.rollouts = std::move(records);
    return result;
}

}  // namespace rice
