/** Serialization of runs: CSV traces, final-state JSON, manifest, exports. */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "swarmsim/engine.hpp"

namespace swarmsim {

inline constexpr const char* kArtifactVersion = "1.0.0";

// Marked manifest line carrying the only non-deterministic output byte(s);
// determinism comparisons drop lines with this prefix.
inline constexpr const char* kTimestampPrefix = "# timestamp:";

std::uint64_t fnv1a(std::string_view text);

std::string metrics_csv(const std::vector<MetricsRecord>& metrics);
std::string events_csv(const std::vector<TraceEvent>& events);
std::string comparison_csv(const std::vector<ComparisonRow>& rows);

// Per-iteration objective series per algorithm, long form: algo,iteration,objective.
std::string convergence_csv(
    const std::vector<std::pair<std::string, std::vector<double>>>& series);

// Self-contained snapshot: area, per-UAV position and coverage radius,
// coalitions with leaders/channels, primaries. Enough to draw the layout.
std::string final_state_json(const WorldState& state, const Scenario& scenario);

struct ManifestInfo {
    std::string scenario_name;
    std::uint64_t scenario_hash = 0;  // fnv1a of the canonical scenario JSON
    std::string command;
    std::string algo;
    std::uint64_t seed = 0;
    LearnerConfig config;
    int iterations_run = 0;
    std::string converged_at = "none";
    std::vector<std::string> files;  // every file the run wrote, manifest excluded
};

std::string run_manifest(const ManifestInfo& info);

// Writes via a temp file + rename so failures never leave partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace swarmsim
