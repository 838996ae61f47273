#pragma once

#include "rice/types.h"

namespace rice::climate {

/// F = f_2x * log2(m_at / m_at_1750) + f_ex. Throws std::domain_error when m_at <= 0.
double radiative_forcing(double m_at, double f_ex, const GlobalParams& params);

/// [t_at', t_lo'] = Phi_T [t_at, t_lo] + B_T * forcing.
Vec2 step_temperature(const Vec2& temperatures, double forcing, const GlobalParams& params);

/// M' = Phi_M M + B_M * total_emission. Throws StateError naming the first
/// reservoir that would go negative.
Vec3 step_carbon(const Vec3& masses, double total_emission, const GlobalParams& params);

/// E_land at the 1-based period `t` (step index + 1).
double land_emissions(int t, const GlobalParams& params);

}  // namespace rice::climate
