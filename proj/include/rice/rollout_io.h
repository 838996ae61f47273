#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rice/engine.h"

namespace rice {

inline constexpr int kRolloutSchemaVersion = 1;

/// Header of the rollout CSV. One row per (step, region), step-major.
/// List cells (tariffs, import_bids, imports, exports, foreign_consumption)
/// hold one value per region joined by ';'. Climate columns repeat the
/// end-of-step global state on every region row of that step.
std::string rollout_csv_header();

std::string format_rollout_csv(const RolloutRecord& record);
/// JSON sidecar: schema_version, seed, config_hash, protocol, dimensions,
/// diagnostics and the negotiation log.
std::string format_rollout_sidecar(const RolloutRecord& record);

RolloutRecord parse_rollout(std::string_view csv, std::string_view sidecar_json);

/// Writes `<stem>.csv` and `<stem>.json`.
void write_rollout(const RolloutRecord& record, const std::filesystem::path& stem);
/// Reads `<stem>.csv` and `<stem>.json`. Throws ConfigError on schema mismatch.
RolloutRecord read_rollout(const std::filesystem::path& stem);

}  // namespace rice
