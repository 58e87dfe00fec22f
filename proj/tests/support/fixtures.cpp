#include "support/fixtures.hpp"

#include <algorithm>
#include <numeric>

namespace evote::testing {

std::string nid_of(std::size_t i) {
  std::string digits = std::to_string(1000 + i);
  return "NID-" + digits;
}

std::vector<VoterRecord> make_voters(std::size_t count, Grid grid) {
  std::vector<VoterRecord> voters;
  voters.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    CellSet cells;
    const std::size_t code = i + 1;
    for (std::size_t bit = 0; bit < 64 && (code >> bit) != 0; ++bit) {
      if ((code >> bit) & 1u) {
        cells.insert(Cell{static_cast<int>(bit / static_cast<std::size_t>(grid.cols)),
                          static_cast<int>(bit % static_cast<std::size_t>(grid.cols))});
      }
    }
    voters.push_back(register_voter(nid_of(i), "Voter " + std::to_string(i), std::move(cells),
                                    "voter" + std::to_string(i) + "@example.org", grid));
  }
  return voters;
}

std::vector<Nominee> nominees(std::size_t count) {
  std::vector<Nominee> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(Nominee{std::string(1, static_cast<char>('A' + i)), "Logo " + std::to_string(i)});
  }
  return out;
}

ElectionConfig basic_config(std::size_t nominee_count, std::size_t groups) {
  ElectionConfig config;
  config.start = 100;
  config.end = 1100;
  config.grace = 200;
  config.group_count = groups;
  config.ballot_bits = 32;
  config.difficulty = 8;
  config.nominees = nominees(nominee_count);
  config.rng_seed = 7;
  return config;
}

std::vector<CastResult> cast_in_windows(Election& election, const std::vector<VoteIntent>& intents) {
  std::vector<std::pair<Timestamp, std::size_t>> order;
  for (std::size_t i = 0; i < intents.size(); ++i) {
    const Group* group = election.group_of(nid_of(intents[i].voter));
    order.emplace_back(group->st + intents[i].offset, i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<CastResult> results(intents.size());
  for (const auto& [at, i] : order) {
    election.advance_to(std::max(at, election.clock()));
    const VoterRecord* voter = election.registry().find_by_nid(nid_of(intents[i].voter));
    results[i] = election.cast_vote(
        VoteRequest{voter->nid, FingerprintCredential{voter->coordinates}, intents[i].nominee, intents[i].fault});
  }
  return results;
}

}  // namespace evote::testing
