#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "omept/analysis.hpp"
#include "omept/config.hpp"
#include "omept/dynamics.hpp"
#include "omept/experiments.hpp"
#include "omept/model.hpp"

namespace omept {

inline constexpr const char* kCodeVersion = "omept 0.1.0";
inline constexpr const char* kRngDescription = "xoshiro256++ / splitmix64 seeding / box-muller";

// Full-precision decimal form of a double (17 significant digits; NaN/Inf
// spelled "nan"/"inf"/"-inf").
std::string format_double(double x);

// --- CSV ------------------------------------------------------------------
// Every writer emits '#'-prefixed header lines (version, rng, seed, units,
// the full config echo) followed by a column-name line and data rows.
// No timestamps anywhere in CSV output.

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, const RunConfig& cfg);
void write_ensemble_csv(std::ostream& os, const EnsembleResult& res, const RunConfig& cfg);
void write_sweep_csv(std::ostream& os, const SweepResult& res, const RunConfig& cfg);
void write_map_csv(std::ostream& os, const RegimeMap& map, const RunConfig& cfg);

// --- JSON -----------------------------------------------------------------
// Envelope: { schema_version, code_version, rng, master_seed, config,
// created_unix, payload }. Everything except created_unix is deterministic;
// rerun comparisons should diff the payload (and config) subtrees.

nlohmann::ordered_json analysis_document(const RunConfig& cfg);
nlohmann::ordered_json trajectory_json(const Trajectory& traj, const RunConfig& cfg);
nlohmann::ordered_json ensemble_json(const EnsembleResult& res, const RunConfig& cfg);
nlohmann::ordered_json sweep_json(const SweepResult& res, const RunConfig& cfg);
nlohmann::ordered_json map_json(const RegimeMap& map, const RunConfig& cfg);

nlohmann::ordered_json envelope(const RunConfig& cfg, const std::string& kind,
                                nlohmann::ordered_json payload);

}  // namespace omept
