#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rice/types.h"

namespace rice {

class CalibrationError : public ModelError {
  public:
    using ModelError::ModelError;
};

/// Yearly (or per-step) observations for one region. Missing series are empty.
struct HistoricalSeries {
    std::string region_id;
    std::vector<int> years;
    std::vector<double> labor;
    std::vector<double> tfp;
    std::vector<double> capital;
    std::vector<double> output;
    std::vector<double> emissions;
};

/// Throws CalibrationError unless years strictly increase, every present
/// series matches the year count and no value is negative.
void validate_series(const HistoricalSeries& series);

/// No-intercept least squares for l_g with y_t = ln L_{t+1} - ln L_t and
/// x_t = ln(1 + L_a) - ln(1 + L_t).
double fit_population(const std::vector<double>& labor, double l_a);

struct TechnologyFit {
    double g_a = 0.0;
    double delta_a = 0.0;
    double residual = 0.0;  // sum of squared one-step errors
    int iterations = 0;
};

/// Carries the best point found when the simplex search hits its iteration cap.
class FitError : public CalibrationError {
  public:
    FitError(const std::string& what, TechnologyFit best) : CalibrationError(what), best_(best) {}
    const TechnologyFit& best() const { return best_; }

  private:
    TechnologyFit best_;
};

struct TechnologyFitOptions {
    int max_iterations = 20000;   // per start
    double size_tolerance = 1e-13;
    std::vector<std::pair<double, double>> starts = {
        {0.05, 0.05}, {0.1, 0.2}, {0.2, 0.5}, {0.3, 1.0}, {0.4, 1.8}, {0.01, 0.01}};
};

/// Sum over t >= 1 of (A_{t+1} - (e^eta + g_a e^{-delta_a Delta (t-1)}) A_t)^2.
double technology_residual(const std::vector<double>& tfp, double g_a, double delta_a, double eta,
                           int delta_years);

/// Nelder-Mead (GSL nmsimplex2) from several starting points, each result
/// polished by a restart at its own optimum.
TechnologyFit fit_technology(const std::vector<double>& tfp, double eta, int delta_years,
                             const TechnologyFitOptions& options = {});

struct KnnReference {
    std::string id;
    double gdp = 0.0;
    double population = 0.0;
    double value = 0.0;
};

struct KnnTarget {
    std::string id;
    double gdp = 0.0;
    double population = 0.0;
};

/// Mean field value of the k nearest references in z-scored (GDP, population)
/// space. Standardization uses the references' mean and population standard
/// deviation (a zero spread leaves that feature unscaled). Distance ties are
/// broken by reference id.
std::vector<double> knn_impute(const std::vector<KnnTarget>& targets, const std::vector<KnnReference>& references,
                               int k = 5);

struct EconomyAggregate {
    double output = 0.0;
    double capital = 0.0;
    double labor = 0.0;
    double tfp = 0.0;  // ignored on input to merge_regions
    double sigma = 0.0;
};

/// Additive K, L, Y; A from the production identity; output-weighted sigma.
EconomyAggregate merge_regions(const std::vector<EconomyAggregate>& parts, double gamma);

/// Splits by fractions c_i with per-piece TFP A_i, solving K_i from the
/// production identity.
std::vector<EconomyAggregate> split_region(const EconomyAggregate& region, const std::vector<double>& fractions,
                                           const std::vector<double>& tfps, double gamma);

/// Table-level merge: L_a summed, rate parameters output-weighted.
/// Labor enters production as l0 / labor_unit.
RegionParams merge_region_params(const std::vector<RegionParams>& parts, const std::string& id, double gamma,
                                 double labor_unit);

/// Table-level split: L_a scaled by c_i, rate parameters copied.
std::vector<RegionParams> split_region_params(const RegionParams& region, const std::vector<double>& fractions,
                                              const std::vector<double>& tfps, const std::vector<std::string>& ids,
                                              double gamma, double labor_unit);

}  // namespace rice
