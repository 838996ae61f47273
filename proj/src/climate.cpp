#include "rice/climate.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rice::climate {

double radiative_forcing(double m_at, double f_ex, const GlobalParams& params) {
    if (!(m_at > 0.0)) {
        throw std::domain_error("radiative_forcing: m_at must be > 0, got " + std::to_string(m_at));
    }
    return params.f_2x * std::log2(m_at / params.m_at_1750) + f_ex;
}

Vec2 step_temperature(const Vec2& t, double forcing, const GlobalParams& params) {
    const auto& phi = params.phi_t;
    return {phi[0][0] * t[0] + phi[0][1] * t[1] + params.b_t[0] * forcing,
            phi[1][0] * t[0] + phi[1][1] * t[1] + params.b_t[1] * forcing};
}

Vec3 step_carbon(const Vec3& m, double total_emission, const GlobalParams& params) {
    static constexpr const char* kReservoir[3] = {"m_at", "m_up", "m_lo"};
    const auto& phi = params.phi_m;
    Vec3 next{};
    for (int i = 0; i < 3; ++i) {
        next[i] = phi[i][0] * m[0] + phi[i][1] * m[1] + phi[i][2] * m[2] +
                  params.b_m[i] * total_emission;
    }
    for (int i = 0; i < 3; ++i) {
        if (next[i] < 0.0) {
            throw StateError(std::string("carbon reservoir ") + kReservoir[i] +
                             " went negative (" + std::to_string(next[i]) +
                             "); check the phi_M configuration");
        }
    }
    return next;
}

double land_emissions(int t, const GlobalParams& params) {
    return params.e_l0 * std::pow(1.0 - params.delta_el, t - 1);
}

}  // namespace rice::climate
