#pragma once

#include "rice/types.h"

namespace rice {

/// Y = A K^gamma L^(1-gamma), with 0^0 = 1.
double production(double tfp, double capital, double labor, double gamma);

/// Fraction of output retained after climate damages: 1 - a1 T - a2 T^2 (unclamped).
double damage_fraction(double t_at, double a1, double a2);

/// theta1 at the 1-based period t.
double mitigation_cost_coeff(double sigma, int t, const GlobalParams& params);

/// Fraction of output retained after abatement spending: 1 - theta1 mu^theta2 (unclamped).
double abatement_fraction(double theta1, double mu, double theta2);

double gross_output(double damage_frac, double abate_frac, double production);

/// K' = (1 - delta_k)^Delta K + Delta Q s.
double step_capital(double capital, double gross_output, double savings, double delta_k,
                    int delta_years);

double step_population(double labor, const RegionParams& region);

double step_technology(double tfp, int t, const RegionParams& region, const GlobalParams& global);

double step_carbon_intensity(double sigma, int t, const RegionParams& region, int delta_years);

}  // namespace rice
