#include "rice/economy.h"

#include <cmath>

namespace rice {

double production(double tfp, double capital, double labor, double gamma) {
    return tfp * std::pow(capital, gamma) * std::pow(labor, 1.0 - gamma);
}

double damage_fraction(double t_at, double a1, double a2) {
    return 1.0 - a1 * t_at - a2 * t_at * t_at;
}

double mitigation_cost_coeff(double sigma, int t, const GlobalParams& params) {
    return params.p_b / (1000.0 * params.theta2) * std::pow(1.0 - params.delta_pb, t - 1) * sigma;
}

double abatement_fraction(double theta1, double mu, double theta2) {
    return 1.0 - theta1 * std::pow(mu, theta2);
}

double gross_output(double damage_frac, double abate_frac, double production) {
    return damage_frac * abate_frac * production;
}

double step_capital(double capital, double gross_output, double savings, double delta_k,
                    int delta_years) {
    const double phi_k = std::pow(1.0 - delta_k, delta_years);
    return phi_k * capital + delta_years * gross_output * savings;
}

double step_population(double labor, const RegionParams& region) {
    return labor * std::pow((1.0 + region.l_a) / (1.0 + labor), region.l_g);
}

double step_technology(double tfp, int t, const RegionParams& region, const GlobalParams& global) {
    const double decay = std::exp(-region.delta_a * global.delta_years * (t - 1));
    return (std::exp(global.eta) + region.g_a * decay) * tfp;
}

double step_carbon_intensity(double sigma, int t, const RegionParams& region, int delta_years) {
    const double rate = region.g_sigma * std::pow(1.0 - region.delta_sigma, delta_years * (t - 1));
    return sigma * std::exp(-rate * delta_years);
}

}  // namespace rice
