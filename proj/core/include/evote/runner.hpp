#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "evote/chain.hpp"
#include "evote/scenario.hpp"
#include "evote/tally.hpp"

namespace evote {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitFault = 2;

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides config.rng_seed
  bool parallel = false;
};

// Everything `run` writes to its output directory.
struct RunArtifacts {
  std::string chain;          // chain.log
  std::string tally;          // tally.json
  std::string report_json;    // report.json
  std::string report_text;    // report.txt
  std::string notifications;  // notifications.log
};

struct RunOutcome {
  int exit_code = kExitOk;
  std::vector<std::string> diagnostics;
  std::vector<Tally> tallies;
  ChainVerdict chain_verdict;
  RunArtifacts artifacts;
};

/// Runs pre-voting, every scripted action, grace, reveal and tally, then
/// verifies the agreed chain. Exit code 2 on divergence or a broken chain.
RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Loads the scenario, runs it and writes the artifacts into `out_dir`.
int run_to_directory(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
                     const RunOptions& options, std::ostream& log);

namespace artifact {
inline constexpr const char* kChain = "chain.log";
inline constexpr const char* kTally = "tally.json";
inline constexpr const char* kReportJson = "report.json";
inline constexpr const char* kReportText = "report.txt";
inline constexpr const char* kNotifications = "notifications.log";
}  // namespace artifact

}  // namespace evote
