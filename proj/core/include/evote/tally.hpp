#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "evote/chain.hpp"

namespace evote {

struct Exclusion {
  std::uint64_t ballot_number = 0;
  std::uint64_t ref = 0;
  std::string reason;  // missing-sibling | malformed-reveal | digest-mismatch | malformed-ballot
  bool operator==(const Exclusion&) const = default;
};

struct DecodedBallot {
  std::uint64_t ballot_number = 0;
  std::uint64_t ref = 0;
  std::string nominee_id;
  bool operator==(const DecodedBallot&) const = default;
};

struct Tally {
  std::size_t node_id = 0;
  std::vector<std::pair<std::string, std::uint64_t>> counts;  // code-plan order
  std::vector<Exclusion> excluded;
  std::vector<DecodedBallot> decoded;

  std::uint64_t counted() const;
  std::uint64_t count_for(const std::string& nominee_id) const;
  /// Equal counts, exclusions and decoded ballots; node_id is ignored.
  bool same_result(const Tally& other) const;
};

/// Joins every ballot block on `chain` to its sibling by broadcast_ref and
/// decodes the choice with the genesis code plan.
Tally compute_tally(const ChainState& chain, std::size_t node_id);

}  // namespace evote
