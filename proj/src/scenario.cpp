#include "rice/scenario.h"

#include <cmath>
#include <sstream>

#include "rice/economy.h"

namespace rice {

namespace {

std::string joined(const std::vector<std::string>& errors) {
    std::ostringstream out;
    out << "invalid scenario (" << errors.size() << " error" << (errors.size() == 1 ? "" : "s")
        << ")";
    for (const auto& e : errors) out << "\n  - " << e;
    return out.str();
}

class Checker {
  public:
    explicit Checker(std::vector<std::string>& errors) : errors_(errors) {}

    void finite(double v, const std::string& name) {
        if (!std::isfinite(v)) errors_.push_back(name + " is not finite");
    }
    void in_range(double v, double lo, double hi, const std::string& name) {
        if (!std::isfinite(v) || v < lo || v > hi) {
            std::ostringstream msg;
            msg << name << " out of [" << lo << "," << hi << "]";
            errors_.push_back(msg.str());
        }
    }
    void positive(double v, const std::string& name) {
        if (!std::isfinite(v) || v <= 0.0) errors_.push_back(name + " must be > 0");
    }
    void non_negative(double v, const std::string& name) {
        if (!std::isfinite(v) || v < 0.0) errors_.push_back(name + " must be >= 0");
    }
    void structural_zero(double v, const std::string& name) {
        if (v != 0.0) errors_.push_back("structural zero violated: " + name + " must be 0");
    }
    void fail(const std::string& msg) { errors_.push_back(msg); }

  private:
    std::vector<std::string>& errors_;
};

void check_global(const GlobalParams& g, Checker& c) {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            c.finite(g.phi_t[i][j], "phi_T(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            c.finite(g.phi_m[i][j], "phi_M(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
    c.structural_zero(g.phi_m[0][2], "phi_M(1,3)");
    c.structural_zero(g.phi_m[2][0], "phi_M(3,1)");
    c.finite(g.b_t[0], "B_T(1)");
    c.structural_zero(g.b_t[1], "B_T(2)");
    c.finite(g.b_m[0], "B_M(1)");
    c.structural_zero(g.b_m[1], "B_M(2)");
    c.structural_zero(g.b_m[2], "B_M(3)");

    c.finite(g.f_2x, "f_2x");
    c.positive(g.m_at_1750, "m_at_1750");
    c.in_range(g.gamma, 0.0, 1.0, "gamma");
    c.non_negative(g.eta, "eta");
    c.in_range(g.delta_k, 0.0, 1.0, "delta_k");
    c.non_negative(g.a1, "a1");
    c.non_negative(g.a2, "a2");
    if (!std::isfinite(g.theta2) || g.theta2 <= 1.0) c.fail("theta2 must be > 1");
    c.positive(g.p_b, "p_b");
    c.in_range(g.delta_pb, 0.0, 1.0, "delta_pb");
    c.non_negative(g.e_l0, "e_l0");
    c.in_range(g.delta_el, 0.0, 1.0, "delta_el");
    c.non_negative(g.alpha_util, "alpha_util");
    if (g.alpha_util == 1.0) c.fail("alpha_util must differ from 1 (log utility is not supported)");
    c.finite(g.lambda_arm, "lambda_arm");
    if (g.lambda_arm == 0.0) c.fail("lambda_arm must be nonzero");
    c.positive(g.psi_dom, "psi_dom");
    c.positive(g.psi_for, "psi_for");
    if (!std::isfinite(g.discount) || g.discount <= 0.0 || g.discount > 1.0)
        c.fail("discount out of (0,1]");
    c.finite(g.interest_rate, "interest_rate");
    c.finite(g.debt_scale, "debt_scale");
    if (g.delta_years < 1) c.fail("delta_years must be >= 1");
    if (g.horizon < 1) c.fail("horizon must be >= 1");
    if (g.num_action_levels < 2) c.fail("num_action_levels must be >= 2");
    if (g.horizon >= 1 && static_cast<long>(g.f_ex_series.size()) < g.horizon) {
        c.fail("f_ex_series length " + std::to_string(g.f_ex_series.size()) +
               " is shorter than horizon " + std::to_string(g.horizon));
    }
    for (std::size_t i = 0; i < g.f_ex_series.size(); ++i)
        c.finite(g.f_ex_series[i], "f_ex_series[" + std::to_string(i) + "]");
    c.positive(g.labor_unit, "labor_unit");
    c.non_negative(g.consumption_floor, "consumption_floor");
}

void check_region(const RegionParams& r, std::size_t index, Checker& c) {
    const std::string p = "region " + (r.id.empty() ? "#" + std::to_string(index + 1) : r.id) + ": ";
    c.positive(r.a0, p + "a0");
    c.positive(r.k0, p + "k0");
    c.positive(r.l0, p + "l0");
    c.positive(r.l_a, p + "l_a");
    c.finite(r.l_g, p + "l_g");
    c.finite(r.g_a, p + "g_a");
    c.finite(r.delta_a, p + "delta_a");
    c.positive(r.sigma0, p + "sigma0");
    c.finite(r.g_sigma, p + "g_sigma");
    if (!std::isfinite(r.delta_sigma) || r.delta_sigma < 0.0 || r.delta_sigma >= 1.0)
        c.fail(p + "delta_sigma out of [0,1)");
    if (r.delta_k) c.in_range(*r.delta_k, 0.0, 1.0, p + "delta_k");
}

}  // namespace

ScenarioError::ScenarioError(std::vector<std::string> errors)
    : ConfigError(joined(errors)), errors_(std::move(errors)) {}

std::vector<std::string> validate_scenario(const GlobalParams& global,
                                           const std::vector<RegionParams>& regions) {
    std::vector<std::string> errors;
    Checker c(errors);
    check_global(global, c);
    if (regions.empty()) c.fail("region table is empty");
    for (std::size_t i = 0; i < regions.size(); ++i) check_region(regions[i], i, c);
    for (std::size_t i = 0; i < regions.size(); ++i)
        for (std::size_t j = i + 1; j < regions.size(); ++j)
            if (!regions[i].id.empty() && regions[i].id == regions[j].id)
                c.fail("duplicate region id " + regions[i].id);
    return errors;
}

std::vector<std::string> validate_scenario(const Scenario& scenario) {
    auto errors = validate_scenario(scenario.global, scenario.regions);
    Checker c(errors);
    const auto& cl = scenario.initial_climate;
    c.finite(cl.t_at, "initial t_at");
    c.finite(cl.t_lo, "initial t_lo");
    c.positive(cl.m_at, "initial m_at");
    c.non_negative(cl.m_up, "initial m_up");
    c.non_negative(cl.m_lo, "initial m_lo");
    return errors;
}

Scenario make_scenario(Scenario scenario) {
    auto errors = validate_scenario(scenario);
    if (!errors.empty()) throw ScenarioError(std::move(errors));
    return scenario;
}

WorldState initial_state(const Scenario& scenario) {
    WorldState s;
    s.step = 0;
    s.climate = scenario.initial_climate;
    s.regions.reserve(scenario.regions.size());
    for (const auto& r : scenario.regions) {
        s.regions.push_back(RegionState{r.k0, r.l0, r.a0, r.sigma0, 0.0});
        s.theta1.push_back(mitigation_cost_coeff(r.sigma0, 1, scenario.global));
    }
    s.reserve_fund.assign(scenario.regions.size(), 0.0);
    return s;
}

}  // namespace rice
