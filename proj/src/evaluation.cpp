#include "rice/evaluation.h"

#include <algorithm>
#include <cmath>

namespace rice {

double climate_index(double t_solution, double t_no_mitigation, double t_full_mitigation) {
    if (!(t_no_mitigation > t_full_mitigation))
        throw EvaluationError("climate index: no-mitigation rise must exceed full-mitigation rise");
    return (t_no_mitigation - t_solution) / (t_no_mitigation - t_full_mitigation);
}

double economic_index(double p_solution, double p_min, double p_max) {
    if (!(p_max > p_min)) throw EvaluationError("economic index: max production must exceed min production");
    return (p_solution - p_min) / (p_max - p_min);
}

bool pareto_dominates(const OutcomePoint& a, const OutcomePoint& b) {
    return (a.climate > b.climate && a.economic >= b.economic) || (a.climate >= b.climate && a.economic > b.economic);
}

std::vector<OutcomePoint> pareto_front(const std::vector<OutcomePoint>& points) {
    std::vector<OutcomePoint> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool keep = true;
        for (std::size_t j = 0; j < points.size() && keep; ++j) {
            if (pareto_dominates(points[j], points[i])) keep = false;
        }
        for (const auto& f : front)
            if (f.climate == points[i].climate && f.economic == points[i].economic) keep = false;
        if (keep) front.push_back(points[i]);
    }
    return front;
}

HypervolumeResult hypervolume_detail(const std::vector<OutcomePoint>& points, const OutcomePoint& reference) {
    HypervolumeResult result;
    std::vector<OutcomePoint> usable;
    for (const auto& p : points) {
        if (std::isfinite(p.climate) && std::isfinite(p.economic) && p.climate >= reference.climate &&
            p.economic >= reference.economic) {
            usable.push_back(p);
        } else {
            ++result.discarded;
        }
    }
    auto front = pareto_front(usable);
    // Climate descending, so economic ascends along the front.
    std::sort(front.begin(), front.end(),
              [](const OutcomePoint& a, const OutcomePoint& b) { return a.climate > b.climate; });
    double covered = reference.economic;
    for (const auto& p : front) {
        if (p.economic <= covered) continue;
        result.area += (p.climate - reference.climate) * (p.economic - covered);
        covered = p.economic;
    }
    return result;
}

double hypervolume(const std::vector<OutcomePoint>& points, const OutcomePoint& reference) {
    return hypervolume_detail(points, reference).area;
}

std::vector<RankedSet> rank_solution_sets(const std::vector<std::vector<OutcomePoint>>& sets,
                                          const OutcomePoint& reference) {
    std::vector<RankedSet> ranked;
    for (std::size_t i = 0; i < sets.size(); ++i) ranked.push_back({i, hypervolume(sets[i], reference)});
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const RankedSet& a, const RankedSet& b) { return a.hypervolume > b.hypervolume; });
    return ranked;
}

}  // namespace rice
