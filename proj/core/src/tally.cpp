#include "evote/tally.hpp"

#include <map>

#include "evote/error.hpp"

namespace evote {

std::uint64_t Tally::counted() const {
  std::uint64_t total = 0;
  for (const auto& [id, count] : counts) total += count;
  return total;
}

std::uint64_t Tally::count_for(const std::string& nominee_id) const {
  for (const auto& [id, count] : counts) {
    if (id == nominee_id) return count;
  }
  return 0;
}

bool Tally::same_result(const Tally& other) const {
  return counts == other.counts && excluded == other.excluded && decoded == other.decoded;
}

Tally compute_tally(const ChainState& chain, std::size_t node_id) {
  Tally tally;
  tally.node_id = node_id;
  const GenesisRecord* genesis = chain.genesis();
  if (genesis == nullptr) {
    throw Error("cannot tally a chain without a genesis block");
  }
  const CodePlan& plan = genesis->plan;
  for (const auto& entry : plan.codes) tally.counts.emplace_back(entry.nominee_id, 0);

  struct Pending {
    std::uint64_t ref;
    std::optional<Ballot> ballot;
  };
  std::vector<Pending> ballots;
  std::map<std::uint64_t, SiblingRecord> siblings;  // first sibling per broadcast_ref

  for (const Block& block : chain.blocks()) {
    const auto kind = block.kind();
    if (kind == PayloadKind::ballot) {
      Pending p{block.header.ref_number, std::nullopt};
      try {
        p.ballot = std::get<Ballot>(block.decode());
      } catch (const ParseError&) {
      }
      ballots.push_back(std::move(p));
    } else if (kind == PayloadKind::sibling) {
      try {
        auto sibling = std::get<SiblingRecord>(block.decode());
        siblings.emplace(sibling.broadcast_ref, std::move(sibling));
      } catch (const ParseError&) {
      }
    }
  }

  for (const auto& p : ballots) {
    if (!p.ballot) {
      tally.excluded.push_back(Exclusion{0, p.ref, "malformed-ballot"});
      continue;
    }
    const Ballot& ballot = *p.ballot;
    auto it = siblings.find(p.ref);
    if (it == siblings.end()) {
      tally.excluded.push_back(Exclusion{ballot.ballot_number, p.ref, "missing-sibling"});
      continue;
    }
    if (it->second.voter_digest != ballot.voter_digest) {
      tally.excluded.push_back(Exclusion{ballot.ballot_number, p.ref, "digest-mismatch"});
      continue;
    }
    try {
      std::string nominee = decode_choice(ballot.ballot_string, it->second.opening, plan);
      for (auto& [id, count] : tally.counts) {
        if (id == nominee) ++count;
      }
      tally.decoded.push_back(DecodedBallot{ballot.ballot_number, p.ref, std::move(nominee)});
    } catch (const MalformedReveal&) {
      tally.excluded.push_back(Exclusion{ballot.ballot_number, p.ref, "malformed-reveal"});
    }
  }
  return tally;
}

}  // namespace evote
