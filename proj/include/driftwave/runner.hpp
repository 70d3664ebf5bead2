#pragma once

#include "driftwave/scenario_config.hpp"

#include <string>

namespace driftwave {

// Exit codes shared by the library runner and the command line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

// Executes one scenario: verification modes write report.txt/report.csv,
// simulation modes write trajectory.csv, summary.txt and mode-specific
// artifacts (spectral.csv, cochain snapshots) into the output directory.
// Reruns with the same (config, seed) produce byte-identical files.
// Returns an exit code; diagnostic text goes to `log`.
int run_scenario(const cfg::ScenarioConfig& config, std::ostream& log);

}  // namespace driftwave
