#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "evote/chain.hpp"
#include "evote/consensus.hpp"

namespace evote {

struct VerifyReport {
  std::optional<std::string> parse_error;
  ChainVerdict verdict;
  std::optional<BallotAudit> audit;
  std::size_t blocks = 0;

  bool ok() const { return !parse_error && verdict.ok && (!audit || audit->matches()); }
  int exit_code() const;
  std::string render() const;
};

/// verify_chain over a chain log plus a validity re-check of every
/// ballot block on it.
VerifyReport verify_chain_text(std::string_view text, unsigned difficulty);
VerifyReport verify_chain_file(const std::filesystem::path& path, unsigned difficulty);

/// Human-readable audit summary of a completed run directory, or the
/// individual-verifiability view of one ballot. Throws Error listing any
/// missing artifact files.
std::string render_report(const std::filesystem::path& dir, std::optional<std::uint64_t> ballot_number);

}  // namespace evote
