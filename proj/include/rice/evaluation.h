#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rice/types.h"

namespace rice {

class EvaluationError : public ModelError {
  public:
    using ModelError::ModelError;
};

struct OutcomePoint {
    double climate = 0.0;   // climate index
    double economic = 0.0;  // economic index
    std::string label;      // provenance (config, seeds); ignored by comparisons
};

/// (T_none - T_sol) / (T_none - T_full). Throws when T_none <= T_full.
double climate_index(double t_solution, double t_no_mitigation, double t_full_mitigation);

/// (P_sol - P_min) / (P_max - P_min). Throws when P_max <= P_min.
double economic_index(double p_solution, double p_min, double p_max);

bool pareto_dominates(const OutcomePoint& a, const OutcomePoint& b);

/// Points not dominated by any other point, in input order; coordinate
/// duplicates are kept once (first occurrence).
std::vector<OutcomePoint> pareto_front(const std::vector<OutcomePoint>& points);

struct HypervolumeResult {
    double area = 0.0;
    std::size_t discarded = 0;  // points that do not weakly dominate the reference
};

/// Area of the union of [ref, p] rectangles.
HypervolumeResult hypervolume_detail(const std::vector<OutcomePoint>& points, const OutcomePoint& reference = {});
double hypervolume(const std::vector<OutcomePoint>& points, const OutcomePoint& reference = {});

struct RankedSet {
    std::size_t index = 0;  // position in the submitted list
    double hypervolume = 0.0;
};

/// Descending hypervolume; ties keep submission order.
std::vector<RankedSet> rank_solution_sets(const std::vector<std::vector<OutcomePoint>>& sets,
                                          const OutcomePoint& reference = {});

}  // namespace rice
