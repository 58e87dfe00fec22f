// evote: run election scenarios, verify chain logs, render audit reports.
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evote/audit.hpp"
#include "evote/error.hpp"
#include "evote/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Blockchain e-voting simulator and audit tool"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the scenario rng_seed");

  std::string scenario_path;
  std::string out_dir;
  bool parallel = false;
  auto* run = app.add_subcommand("run", "Run a scenario and write chain, tally and report files");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "Output directory")->required();
  run->add_flag("--parallel", parallel, "Validate proposals on one worker per peer");
  run->add_option("--seed", seed, "Override the scenario rng_seed");

  std::string chain_path;
  unsigned difficulty = 8;
  auto* verify = app.add_subcommand("verify", "Verify a persisted chain log");
  verify->add_option("chain", chain_path, "chain.log file")->required();
  verify->add_option("--difficulty", difficulty, "Leading zero bits required of every block")
      ->check(CLI::Range(0u, evote::kMaxDifficulty));

  std::string report_dir;
  std::optional<std::uint64_t> ballot;
  auto* report = app.add_subcommand("report", "Render the audit report of a completed run");
  report->add_option("dir", report_dir, "Run output directory")->required();
  report->add_option("--ballot", ballot, "Show one ballot's block, verdicts and decoded choice");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    evote::RunOptions options;
    options.seed = seed;
    options.parallel = parallel;
    return evote::run_to_directory(scenario_path, out_dir, options, std::cout);
  }
  if (*verify) {
    const auto result = evote::verify_chain_file(chain_path, difficulty);
    std::cout << result.render();
    return result.exit_code();
  }
  try {
    std::cout << evote::render_report(report_dir, ballot);
  } catch (const evote::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return evote::kExitInputError;
  }
  return evote::kExitOk;
}
