#include "evote/consensus.hpp"

#include <algorithm>
#include <future>

#include "evote/error.hpp"

namespace evote {

std::string_view to_string(PeerPolicy policy) {
  switch (policy) {
    case PeerPolicy::honest: return "honest";
    case PeerPolicy::always_reject: return "always_reject";
    case PeerPolicy::always_accept: return "always_accept";
  }
  return "unknown";
}

PeerPolicy parse_peer_policy(std::string_view name) {
  if (name == "honest") return PeerPolicy::honest;
  if (name == "always_reject" || name == "always-reject") return PeerPolicy::always_reject;
  if (name == "always_accept" || name == "always-accept") return PeerPolicy::always_accept;
  throw ValidationError("unknown peer policy '" + std::string(name) + "'");
}

ElectionRules ElectionRules::from_chain(const ChainState& chain) {
  const GenesisRecord* genesis = chain.genesis();
  const ScheduleRecord* schedule = chain.schedule();
  if (genesis == nullptr || schedule == nullptr) {
    throw Error("chain lacks a genesis or schedule block");
  }
  ElectionRules rules;
  rules.start = genesis->start;
  rules.end = genesis->end;
  rules.grace = genesis->grace;
  rules.ballot_bits = genesis->ballot_bits;
  rules.difficulty = genesis->difficulty;
  for (const auto& voter : genesis->voters) {
    if (!voter.binary_value.empty() && is_bit_string(voter.binary_value)) {
      rules.registered.insert(voter_digest(voter.binary_value));
    }
  }
  for (const auto& group : schedule->groups) {
    for (const auto& member : group.members) {
      rules.windows.emplace(member, Window{group.st, group.et});
    }
  }
  return rules;
}

bool ElectionRules::cast_on_time(const Digest& voter, Timestamp at) const {
  if (at < start || at >= end + grace) return false;
  if (at >= end) return true;  // grace window
  auto it = windows.find(voter);
  return it != windows.end() && it->second.st <= at && at < it->second.et;
}

std::vector<std::string> failed_predicates(const Block& block, const ElectionRules& rules,
                                           const CountedState& counted, Timestamp now) {
  std::vector<std::string> failed;
  const Ballot* ballot = nullptr;
  Payload payload;
  try {
    payload = block.decode();
    ballot = std::get_if<Ballot>(&payload);
  } catch (const ParseError&) {
  }
  if (ballot == nullptr) {
    failed.emplace_back(predicate::kCorrectFormat);
    return failed;
  }

  const bool format_ok = sha256(block.payload) == block.header.payload_hash &&
                         meets_difficulty(block.hash(), rules.difficulty) &&
                         check_format(*ballot, rules.ballot_bits).valid() &&
                         !counted.ballot_numbers.contains(ballot->ballot_number);
  if (!format_ok) failed.emplace_back(predicate::kCorrectFormat);
  if (!rules.registered.contains(ballot->voter_digest)) failed.emplace_back(predicate::kHasAllSignature);
  const Timestamp at = block.header.timestamp;
  if (at > now || !rules.cast_on_time(ballot->voter_digest, at)) failed.emplace_back(predicate::kCastOnTime);
  if (counted.digests.contains(ballot->voter_digest)) failed.emplace_back(predicate::kNotCounted);
  return failed;
}

Verdict PeerNode::policy_verdict() const {
  Verdict v{id_, policy_ == PeerPolicy::always_accept, {}};
  if (!v.accept) v.reasons.emplace_back("policy:always_reject");
  return v;
}

std::vector<std::string> PeerNode::link_failures(const Block& block) const {
  if (block.header.ref_number != chain_.next_ref() || block.header.prev_hash != chain_.tip_hash() ||
      block.header.timestamp < chain_.tip_timestamp()) {
    return {std::string(predicate::kCorrectFormat)};
  }
  return {};
}

Verdict PeerNode::validate_ballot_block(const Block& block, Timestamp now) const {
  if (!honest()) return policy_verdict();
  Verdict v{id_, false, {}};
  if (!rules_) {
    v.reasons.emplace_back(predicate::kCorrectFormat);
    return v;
  }
  v.reasons = failed_predicates(block, *rules_, counted_, now);
  if (!link_failures(block).empty() &&
      std::find(v.reasons.begin(), v.reasons.end(), predicate::kCorrectFormat) == v.reasons.end()) {
    v.reasons.insert(v.reasons.begin(), std::string(predicate::kCorrectFormat));
  }
  v.accept = v.reasons.empty();
  return v;
}

Verdict PeerNode::validate_sibling_block(const Block& block) const {
  if (!honest()) return policy_verdict();
  Verdict v{id_, false, {}};
  const SiblingRecord* sibling = nullptr;
  Payload payload;
  try {
    payload = block.decode();
    sibling = std::get_if<SiblingRecord>(&payload);
  } catch (const ParseError&) {
  }
  const unsigned difficulty = chain_.genesis() ? chain_.genesis()->difficulty : 0;
  if (sibling == nullptr || !link_failures(block).empty() || sha256(block.payload) != block.header.payload_hash ||
      !meets_difficulty(block.hash(), difficulty) || sibling->own_ref != block.header.ref_number) {
    v.reasons.emplace_back("sibling-format");
    return v;
  }
  const auto ballot_ref = chain_.ballot_ref_for(sibling->voter_digest);
  if (!ballot_ref || *ballot_ref != sibling->broadcast_ref) {
    v.reasons.emplace_back("sibling-reference");
  }
  if (chain_.has_sibling_for(sibling->broadcast_ref)) {
    v.reasons.emplace_back("sibling-duplicate");
  }
  v.accept = v.reasons.empty();
  return v;
}

void PeerNode::append(Block block) {
  std::optional<Ballot> ballot;
  if (block.kind() == PayloadKind::ballot) {
    try {
      ballot = std::get<Ballot>(block.decode());
    } catch (const ParseError&) {
    }
  }
  chain_.append(std::move(block));
  if (ballot) counted_.record(*ballot);
  if (!rules_ && chain_.genesis() && chain_.schedule()) {
    rules_ = ElectionRules::from_chain(chain_);
  }
}

Verdict validate_ballot_block(const PeerNode& peer, const Block& block, Timestamp now) {
  return peer.validate_ballot_block(block, now);
}

Network::Network(const std::vector<PeerPolicy>& policies) {
  if (policies.empty()) {
    throw ParameterError("the network needs at least one peer");
  }
  peers_.reserve(policies.size());
  for (std::size_t i = 0; i < policies.size(); ++i) peers_.emplace_back(i, policies[i]);
}

void Network::install(const Block& block) {
  for (auto& peer : peers_) peer.append(block);
}

std::vector<Verdict> Network::collect(const Block& block, Timestamp now) const {
  const auto kind = block.kind();
  auto judge = [&](const PeerNode& peer) -> Verdict {
    if (kind == PayloadKind::ballot) return peer.validate_ballot_block(block, now);
    if (kind == PayloadKind::sibling) return peer.validate_sibling_block(block);
    if (!peer.honest()) return peer.validate_ballot_block(block, now);
    return Verdict{peer.id(), false, {"unexpected-block-kind"}};
  };

  std::vector<Verdict> verdicts;
  verdicts.reserve(peers_.size());
  if (!parallel_ || peers_.size() == 1) {
    for (const auto& peer : peers_) verdicts.push_back(judge(peer));
    return verdicts;
  }
  std::vector<std::future<Verdict>> pending;
  pending.reserve(peers_.size());
  for (const auto& peer : peers_) {
    pending.push_back(std::async(std::launch::async, judge, std::cref(peer)));
  }
  for (auto& f : pending) verdicts.push_back(f.get());
  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.peer_id < b.peer_id; });
  return verdicts;
}

ProposalOutcome Network::propose(const Block& block, Timestamp now) {
  ProposalOutcome outcome;
  outcome.verdicts = collect(block, now);
  for (const auto& v : outcome.verdicts) {
    (v.accept ? outcome.accepts : outcome.rejects) += 1;
  }
  outcome.accepted = majority_accepts(outcome.accepts, peers_.size());
  if (outcome.accepted) {
    for (auto& peer : peers_) {
      try {
        peer.append(block);
      } catch (const LinkError& e) {
        throw DivergenceError("peer " + std::to_string(peer.id()) + " cannot append accepted block " +
                              std::to_string(block.header.ref_number) + ": " + e.what());
      }
    }
  }
  return outcome;
}

const PeerNode& Network::reference() const {
  for (const auto& peer : peers_) {
    if (peer.honest()) return peer;
  }
  return peers_.front();
}

bool Network::honest_chains_identical() const {
  const ChainState& ref = reference().chain();
  return std::all_of(peers_.begin(), peers_.end(),
                     [&](const PeerNode& p) { return !p.honest() || p.chain() == ref; });
}

void Network::tamper_bit(std::uint64_t ref, std::size_t bit) {
  for (auto& peer : peers_) peer.tamper_bit(ref, bit);
}

std::vector<Block> filter_valid_ballots(std::span<const Block> proposed, const ElectionRules& rules, Timestamp now) {
  std::vector<Block> valid;
  CountedState counted;
  for (const Block& block : proposed) {
    if (!failed_predicates(block, rules, counted, now).empty()) continue;
    counted.record(std::get<Ballot>(block.decode()));
    valid.push_back(block);
  }
  return valid;
}

BallotAudit audit_ballots(std::span<const Block> proposed, const ChainState& chain, Timestamp now) {
  BallotAudit audit;
  const ElectionRules rules = ElectionRules::from_chain(chain);
  for (const Block& block : filter_valid_ballots(proposed, rules, now)) {
    audit.valid.push_back(std::get<Ballot>(block.decode()).ballot_number);
  }
  for (const Block& block : chain.blocks()) {
    if (block.kind() != PayloadKind::ballot) continue;
    try {
      audit.on_chain.push_back(std::get<Ballot>(block.decode()).ballot_number);
    } catch (const ParseError&) {
      audit.mismatches.push_back("block " + std::to_string(block.header.ref_number) + " holds an undecodable ballot");
    }
  }
  for (auto n : audit.valid) {
    if (std::find(audit.on_chain.begin(), audit.on_chain.end(), n) == audit.on_chain.end()) {
      audit.mismatches.push_back("valid ballot " + std::to_string(n) + " is missing from the chain");
    }
  }
  for (auto n : audit.on_chain) {
    if (std::find(audit.valid.begin(), audit.valid.end(), n) == audit.valid.end()) {
      audit.mismatches.push_back("chain ballot " + std::to_string(n) + " fails the validity predicates");
    }
  }
  return audit;
}

}  // namespace evote
