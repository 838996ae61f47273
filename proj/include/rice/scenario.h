#pragma once

#include <string>
#include <vector>

#include "rice/types.h"

namespace rice {

/// Thrown by make_scenario; carries every violated invariant.
class ScenarioError : public ConfigError {
  public:
    explicit ScenarioError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

  private:
    std::vector<std::string> errors_;
};

/// Checks every GlobalParams / RegionParams invariant and returns all
/// violations in a fixed order (globals first, then regions in table order).
std::vector<std::string> validate_scenario(const GlobalParams& global,
                                           const std::vector<RegionParams>& regions);

/// Full check including the initial climate state.
std::vector<std::string> validate_scenario(const Scenario& scenario);

/// Returns the scenario unchanged or throws ScenarioError.
Scenario make_scenario(Scenario scenario);

/// Initial world state at step 0 built from the region table.
WorldState initial_state(const Scenario& scenario);

}  // namespace rice
