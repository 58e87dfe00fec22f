#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "evote/election.hpp"
#include "evote/identity.hpp"
#include "evote/scenario.hpp"

namespace evote::testing {

// Voter i gets the cells encoding (i + 1) in binary along the grid, so
// every coordinate set is distinct and non-empty.
std::vector<VoterRecord> make_voters(std::size_t count, Grid grid = {});
std::string nid_of(std::size_t i);

std::vector<Nominee> nominees(std::size_t count);  // ids A, B, C, ...

// ST=100, ET=1100, grace=200, one group, N=32, difficulty 8.
ElectionConfig basic_config(std::size_t nominee_count = 3, std::size_t groups = 1);

struct VoteIntent {
  std::size_t voter = 0;
  std::string nominee;
  Duration offset = 1;  // relative to the voter's group window start
  SiblingFault fault = SiblingFault::none;
};

// Casts every intent inside its voter's window, in time order, with the
// registered fingerprint. Returns the results in intent order.
std::vector<CastResult> cast_in_windows(Election& election, const std::vector<VoteIntent>& intents);

}  // namespace evote::testing
