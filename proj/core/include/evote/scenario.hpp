#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evote/consensus.hpp"
#include "evote/election.hpp"

namespace evote {

enum class ActionKind { vote, vote_with_pin, request_pin, rogue_vote, tamper, noop };

std::string_view to_string(ActionKind kind);

struct ScenarioAction {
  // Exactly one of `at` and `window_offset` is set. A window offset is
  // relative to the start of the actor's group window.
  std::optional<Timestamp> at;
  std::optional<Duration> window_offset;
  std::string actor;  // a registry NID, or "external" for tamper
  ActionKind kind = ActionKind::noop;
  std::string nominee;
  std::optional<CellSet> fingerprint;
  std::optional<std::string> pin;
  std::uint64_t block_ref = 0;
  std::size_t bit = 0;
  SiblingFault fault = SiblingFault::none;
};

struct Scenario {
  ElectionConfig config;
  std::vector<VoterRecord> voters;
  std::vector<PeerPolicy> peers;
  std::vector<ScenarioAction> actions;
};

/// Parses the JSON scenario format. Throws ParseError naming the byte
/// offset for syntax errors and the field path for schema errors.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

}  // namespace evote
