#include "rice/trade.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rice {

double SquareMatrix::row_sum(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j);
    return s;
}

double SquareMatrix::col_sum(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) s += (*this)(i, j);
    return s;
}

namespace trade {

double accrue_interest(double balance, double interest_rate) { return balance * (1.0 + interest_rate); }

std::vector<double> scale_bids_to_output(std::span<const double> bids, double gross_output) {
    std::vector<double> out(bids.begin(), bids.end());
    const double total = std::accumulate(bids.begin(), bids.end(), 0.0);
    if (total <= 0.0) return out;
    const double factor = std::min(1.0, gross_output / total);
    for (auto& b : out) b *= factor;
    return out;
}

std::vector<double> apply_debt_scaling(std::span<const double> bids, double balance,
                                       double initial_capital, double debt_scale) {
    const double debt_ratio = debt_scale * balance / initial_capital;
    std::vector<double> out(bids.size());
    for (std::size_t j = 0; j < bids.size(); ++j) out[j] = std::max(0.0, bids[j] * (1.0 + debt_ratio));
    return out;
}

double max_exports(double gross_output, double investment, double export_limit) {
    return std::max(0.0, std::min(export_limit * gross_output, gross_output - investment));
}

SquareMatrix cap_exports(const SquareMatrix& bids, std::span<const double> gross_output,
                         std::span<const double> investment, std::span<const double> export_limit) {
    const std::size_t n = bids.size();
    SquareMatrix x = bids;
    for (std::size_t j = 0; j < n; ++j) {
        const double cap = max_exports(gross_output[j], investment[j], export_limit[j]);
        double demand = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != j) demand += bids(i, j);
        const double factor = demand > 0.0 ? std::min(1.0, cap / demand) : 1.0;
        for (std::size_t i = 0; i < n; ++i) x(i, j) = (i == j) ? 0.0 : bids(i, j) * factor;
    }
    return x;
}

TariffedGoods tariff_consumption(double imports, double tariff) {
    return {imports * (1.0 - tariff), tariff * imports};
}

double domestic_consumption_raw(double gross_output, double savings, double exports) {
    return (1.0 - savings) * gross_output - exports;
}

double aggregate_consumption(double domestic, std::span<const double> foreign,
                             const GlobalParams& params) {
    const double lambda = params.lambda_arm;
    if (lambda == 0.0) throw ConfigError("aggregate_consumption: lambda_arm = 0 is undefined");
    double inner = params.psi_dom * std::pow(domestic, lambda);
    for (double c : foreign) inner += params.psi_for * std::pow(c, lambda);
    return std::pow(inner, 1.0 / lambda);
}

double utility(double labor, double consumption, double alpha) {
    if (alpha == 1.0) throw ConfigError("utility: alpha_util = 1 (log utility) is not supported");
    return labor / (1.0 - alpha) * std::pow(consumption / labor, 1.0 - alpha);
}

double update_balance(double balance, double imports_total, double exports_total, int delta_years) {
    return balance + delta_years * (exports_total - imports_total);
}

}  // namespace trade
}  // namespace rice
