#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rice/types.h"

namespace rice {

/// Dense n x n matrix, row-major.
class SquareMatrix {
  public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

    std::size_t size() const { return n_; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * n_, n_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
    double row_sum(std::size_t i) const;
    double col_sum(std::size_t j) const;
    bool operator==(const SquareMatrix&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> data_;
};

/// Trade flows for one step. Convention: entry (i, j) is goods flowing from
/// exporter j to importer i.
struct TradeFlows {
    SquareMatrix bids;         // desired imports after norm_1 and debt scaling
    SquareMatrix imports;      // realized x_{i,j}
    SquareMatrix consumption;  // tariffed foreign consumption C_{i,j}
    std::vector<double> tariff_revenue;
    std::vector<double> export_totals;
    std::vector<double> import_totals;
};

namespace trade {

/// D' = D (1 + rate).
double accrue_interest(double balance, double interest_rate);

/// Scales a bid row so that it sums to at most gross_output.
std::vector<double> scale_bids_to_output(std::span<const double> bids, double gross_output);

/// bids * (1 + debt_scale * D / K0), clamped at 0.
std::vector<double> apply_debt_scaling(std::span<const double> bids, double balance,
                                       double initial_capital, double debt_scale);

/// max(0, min(p_x Q, Q - I)).
double max_exports(double gross_output, double investment, double export_limit);

/// Scales each exporter column j of `bids` by min{1, x_max_j / sum_i b_{i,j}}.
SquareMatrix cap_exports(const SquareMatrix& bids, std::span<const double> gross_output,
                         std::span<const double> investment, std::span<const double> export_limit);

struct TariffedGoods {
    double consumed;
    double revenue;
};
TariffedGoods tariff_consumption(double imports, double tariff);

/// Unclamped (1 - s) Q - exports.
double domestic_consumption_raw(double gross_output, double savings, double exports);

/// (psi_dom C_ii^lambda + sum_j psi_for C_ij^lambda)^(1/lambda). Throws ConfigError for lambda = 0.
double aggregate_consumption(double domestic, std::span<const double> foreign,
                             const GlobalParams& params);

/// L / (1 - alpha) (C / L)^(1 - alpha). Throws ConfigError for alpha = 1.
double utility(double labor, double consumption, double alpha);

/// D' = D + Delta (exports - imports).
double update_balance(double balance, double imports_total, double exports_total, int delta_years);

}  // namespace trade
}  // namespace rice
