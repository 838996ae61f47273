#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "rice/agents.h"
#include "rice/negotiation.h"
#include "rice/types.h"

namespace rice {

inline constexpr int kScenarioSchemaVersion = 1;

enum class EconIndex { Cumulative, Terminal };

EconIndex parse_econ_index(const std::string& name);
std::string to_string(EconIndex kind);
EmissionsForm parse_emissions_form(const std::string& name);
std::string to_string(EmissionsForm form);

/// Run settings that travel with a scenario file but do not affect the dynamics.
struct RunConfig {
    ProtocolSpec protocol;
    std::vector<PolicySpec> policies = {PolicySpec::extremal_min()};  // one shared spec, or one per region
    std::vector<std::uint64_t> seeds = {0};
    EconIndex econ_index = EconIndex::Cumulative;
};

struct ScenarioFile {
    Scenario scenario;
    RunConfig run;
};

/// Parses a scenario document. Relative `regions_file` paths resolve against
/// `base_dir`. Does not validate the dynamics; call make_scenario for that.
/// Throws ConfigError on syntax errors, unknown keys or wrong types.
ScenarioFile parse_scenario(std::string_view text, const std::filesystem::path& base_dir = {});
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Canonical, self-contained text form (regions inlined, shortest round-trip
/// numbers). parse_scenario(serialize_scenario(s)) reproduces s exactly.
std::string serialize_scenario(const Scenario& scenario);
std::string serialize_scenario(const ScenarioFile& file);

/// 64-bit FNV-1a of the canonical serialization, as 16 lowercase hex digits.
std::string config_hash(const Scenario& scenario);
std::uint64_t fnv1a64(std::string_view bytes);

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v);
/// Fixed 17-significant-digit formatting.
std::string format_double17(double v);
/// Strict parse: the whole string must be a finite number.
double parse_double(std::string_view text, std::string_view context);

}  // namespace rice
