#include "rice/calibration.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace rice {

void validate_series(const HistoricalSeries& s) {
    const std::string p = "series '" + s.region_id + "': ";
    for (std::size_t i = 1; i < s.years.size(); ++i)
        if (s.years[i] <= s.years[i - 1]) throw CalibrationError(p + "years must be strictly increasing");
    const std::pair<const char*, const std::vector<double>*> fields[] = {
        {"labor", &s.labor}, {"tfp", &s.tfp}, {"capital", &s.capital}, {"output", &s.output},
        {"emissions", &s.emissions}};
    for (const auto& [name, v] : fields) {
        if (v->empty()) continue;
        if (v->size() != s.years.size())
            throw CalibrationError(p + name + " has " + std::to_string(v->size()) + " values for " +
                                   std::to_string(s.years.size()) + " years");
        for (double x : *v)
            if (!std::isfinite(x) || x < 0.0) throw CalibrationError(p + name + " contains a negative or non-finite value");
    }
}

double fit_population(const std::vector<double>& labor, double l_a) {
    if (labor.size() < 2) throw CalibrationError("fit_population needs at least 2 observations");
    if (!(l_a > 0.0)) throw CalibrationError("fit_population needs l_a > 0");
    const double log_a = std::log1p(l_a);
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t t = 0; t + 1 < labor.size(); ++t) {
        if (!(labor[t] > 0.0) || !(labor[t + 1] > 0.0)) throw CalibrationError("fit_population needs L > 0");
        const double x = log_a - std::log1p(labor[t]);
        const double y = std::log(labor[t + 1]) - std::log(labor[t]);
        sxy += x * y;
        sxx += x * x;
    }
    if (sxx == 0.0) throw CalibrationError("fit_population: degenerate fit, series is pinned at l_a");
    return sxy / sxx;
}

double technology_residual(const std::vector<double>& tfp, double g_a, double delta_a, double eta,
                           int delta_years) {
    const double growth = std::exp(eta);
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < tfp.size(); ++k) {
        const double predicted = (growth + g_a * std::exp(-delta_a * delta_years * static_cast<double>(k))) * tfp[k];
        const double e = tfp[k + 1] - predicted;
        sum += e * e;
    }
    return sum;
}

namespace {

struct TechData {
    const std::vector<double>* tfp;
    double eta;
    int delta_years;
};

double objective(const gsl_vector* x, void* params) {
    const auto* d = static_cast<const TechData*>(params);
    return technology_residual(*d->tfp, gsl_vector_get(x, 0), gsl_vector_get(x, 1), d->eta, d->delta_years);
}

struct RunResult {
    TechnologyFit fit;
    bool converged;
};

RunResult simplex(const TechData& data, double g0, double d0, const TechnologyFitOptions& opt) {
    gsl_multimin_function fn{&objective, 2, const_cast<TechData*>(&data)};
    gsl_vector* x = gsl_vector_alloc(2);
    gsl_vector* step = gsl_vector_alloc(2);
    gsl_vector_set(x, 0, g0);
    gsl_vector_set(x, 1, d0);
    gsl_vector_set(step, 0, std::max(0.05, std::abs(g0) * 0.5));
    gsl_vector_set(step, 1, std::max(0.05, std::abs(d0) * 0.5));
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
    gsl_multimin_fminimizer_set(s, &fn, x, step);

    int iter = 0;
    int status = GSL_CONTINUE;
    while (status == GSL_CONTINUE && iter < opt.max_iterations) {
        ++iter;
        if (gsl_multimin_fminimizer_iterate(s)) break;
        status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), opt.size_tolerance);
    }
    RunResult r{{gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1), s->fval, iter}, status == GSL_SUCCESS};
    // A simplex that collapsed on an exact zero is converged even if the size test never fired.
    if (s->fval == 0.0) r.converged = true;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
    return r;
}

}  // namespace

TechnologyFit fit_technology(const std::vector<double>& tfp, double eta, int delta_years,
                             const TechnologyFitOptions& options) {
    if (tfp.size() < 3) throw CalibrationError("fit_technology needs at least 3 observations");
    for (double a : tfp)
        if (!std::isfinite(a) || a <= 0.0) throw CalibrationError("fit_technology needs positive finite A values");
    if (options.starts.empty()) throw CalibrationError("fit_technology needs at least one start point");

    gsl_error_handler_t* old = gsl_set_error_handler_off();
    const TechData data{&tfp, eta, delta_years};
    std::optional<RunResult> best;
    int total_iterations = 0;
    for (const auto& [g0, d0] : options.starts) {
        RunResult r = simplex(data, g0, d0, options);
        total_iterations += r.fit.iterations;
        // Restart at the optimum with a fresh simplex until it stops improving.
        for (int polish = 0; polish < 5; ++polish) {
            RunResult again = simplex(data, r.fit.g_a, r.fit.delta_a, options);
            total_iterations += again.fit.iterations;
            const bool improved = again.fit.residual < r.fit.residual;
            if (again.fit.residual <= r.fit.residual) r = {again.fit, again.converged};
            if (!improved) break;
        }
        if (!best || r.fit.residual < best->fit.residual) best = r;
    }
    gsl_set_error_handler(old);

    TechnologyFit fit = best->fit;
    fit.iterations = total_iterations;
    if (!best->converged) {
        std::ostringstream msg;
        msg << "fit_technology did not converge within " << options.max_iterations
            << " iterations per start; best residual " << fit.residual;
        throw FitError(msg.str(), fit);
    }
    return fit;
}

std::vector<double> knn_impute(const std::vector<KnnTarget>& targets, const std::vector<KnnReference>& references,
                               int k) {
    if (k < 1) throw CalibrationError("knn_impute needs k >= 1");
    if (references.size() < static_cast<std::size_t>(k)) {
        throw CalibrationError("knn_impute needs at least " + std::to_string(k) + " references, got " +
                               std::to_string(references.size()));
    }
    const auto stats = [&](double KnnReference::*field) {
        double mean = 0.0;
        for (const auto& r : references) mean += r.*field;
        mean /= static_cast<double>(references.size());
        double var = 0.0;
        for (const auto& r : references) var += (r.*field - mean) * (r.*field - mean);
        const double sd = std::sqrt(var / static_cast<double>(references.size()));
        return std::pair{mean, sd > 0.0 ? sd : 1.0};
    };
    const auto [gdp_mean, gdp_sd] = stats(&KnnReference::gdp);
    const auto [pop_mean, pop_sd] = stats(&KnnReference::population);

    std::vector<std::size_t> order(references.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return references[a].id < references[b].id; });

    std::vector<double> out;
    for (const auto& t : targets) {
        const double tg = (t.gdp - gdp_mean) / gdp_sd;
        const double tp = (t.population - pop_mean) / pop_sd;
        std::vector<std::pair<double, std::size_t>> dist;
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            const auto& r = references[order[rank]];
            const double dg = (r.gdp - gdp_mean) / gdp_sd - tg;
            const double dp = (r.population - pop_mean) / pop_sd - tp;
            dist.emplace_back(dg * dg + dp * dp, rank);
        }
        std::sort(dist.begin(), dist.end());
        double sum = 0.0;
        for (int i = 0; i < k; ++i) sum += references[order[dist[static_cast<std::size_t>(i)].second]].value;
        out.push_back(sum / k);
    }
    return out;
}

EconomyAggregate merge_regions(const std::vector<EconomyAggregate>& parts, double gamma) {
    if (parts.empty()) throw CalibrationError("merge_regions needs at least one region");
    EconomyAggregate m;
    double weighted_sigma = 0.0;
    for (const auto& p : parts) {
        m.output += p.output;
        m.capital += p.capital;
        m.labor += p.labor;
        weighted_sigma += p.sigma * p.output;
    }
    if (m.capital == 0.0 || m.labor == 0.0) throw CalibrationError("merge_regions: merged capital or labor is zero");
    if (m.output == 0.0) throw CalibrationError("merge_regions: merged output is zero");
    m.tfp = m.output / (std::pow(m.capital, gamma) * std::pow(m.labor, 1.0 - gamma));
    m.sigma = weighted_sigma / m.output;
    return m;
}

std::vector<EconomyAggregate> split_region(const EconomyAggregate& region, const std::vector<double>& fractions,
                                           const std::vector<double>& tfps, double gamma) {
    if (fractions.empty() || fractions.size() != tfps.size())
        throw CalibrationError("split_region needs one TFP per fraction");
    double total = 0.0;
    for (double c : fractions) {
        if (!(c > 0.0)) throw CalibrationError("split_region fractions must be > 0");
        total += c;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "split_region fractions sum to " << total << ", expected 1";
        throw CalibrationError(msg.str());
    }
    if (!(gamma > 0.0)) throw CalibrationError("split_region needs gamma > 0");
    std::vector<EconomyAggregate> out;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(tfps[i] > 0.0)) throw CalibrationError("split_region TFP values must be > 0");
        EconomyAggregate p;
        p.labor = fractions[i] * region.labor;
        p.output = fractions[i] * region.output;
        p.sigma = region.sigma;
        p.tfp = tfps[i];
        p.capital = std::pow(p.output / (p.tfp * std::pow(p.labor, 1.0 - gamma)), 1.0 / gamma);
        out.push_back(p);
    }
    return out;
}

namespace {

double table_output(const RegionParams& r, double gamma, double labor_unit) {
    return r.a0 * std::pow(r.k0, gamma) * std::pow(r.l0 / labor_unit, 1.0 - gamma);
}

}  // namespace

RegionParams merge_region_params(const std::vector<RegionParams>& parts, const std::string& id, double gamma,
                                 double labor_unit) {
    if (parts.empty()) throw CalibrationError("merge needs at least one region");
    std::vector<EconomyAggregate> econ;
    for (const auto& p : parts)
        econ.push_back({table_output(p, gamma, labor_unit), p.k0, p.l0 / labor_unit, p.a0, p.sigma0});
    const EconomyAggregate m = merge_regions(econ, gamma);

    RegionParams out;
    out.id = id;
    out.a0 = m.tfp;
    out.k0 = m.capital;
    out.l0 = m.labor * labor_unit;
    out.sigma0 = m.sigma;
    const auto weighted = [&](double RegionParams::*field) {
        double sum = 0.0;
        for (std::size_t i = 0; i < parts.size(); ++i) sum += parts[i].*field * econ[i].output;
        return sum / m.output;
    };
    for (const auto& p : parts) out.l_a += p.l_a;
    out.l_g = weighted(&RegionParams::l_g);
    out.g_a = weighted(&RegionParams::g_a);
    out.delta_a = weighted(&RegionParams::delta_a);
    out.g_sigma = weighted(&RegionParams::g_sigma);
    out.delta_sigma = weighted(&RegionParams::delta_sigma);
    out.delta_k = parts.front().delta_k;
    for (const auto& p : parts)
        if (p.delta_k != out.delta_k) throw CalibrationError("merge: regions carry different delta_k overrides");
    return out;
}

std::vector<RegionParams> split_region_params(const RegionParams& region, const std::vector<double>& fractions,
                                              const std::vector<double>& tfps, const std::vector<std::string>& ids,
                                              double gamma, double labor_unit) {
    if (ids.size() != fractions.size()) throw CalibrationError("split needs one id per fraction");
    const EconomyAggregate whole{table_output(region, gamma, labor_unit), region.k0, region.l0 / labor_unit,
                                 region.a0, region.sigma0};
    const auto pieces = split_region(whole, fractions, tfps, gamma);
    std::vector<RegionParams> out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        RegionParams r = region;
        r.id = ids[i];
        r.a0 = pieces[i].tfp;
        r.k0 = pieces[i].capital;
        r.l0 = pieces[i].labor * labor_unit;
        r.l_a = region.l_a * fractions[i];
        r.sigma0 = pieces[i].sigma;
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace rice
