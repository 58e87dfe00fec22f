#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "evote/chain.hpp"

namespace evote {

enum class PeerPolicy { honest, always_reject, always_accept };

std::string_view to_string(PeerPolicy policy);
/// Throws ValidationError for an unknown name.
PeerPolicy parse_peer_policy(std::string_view name);

// Ballot-validity predicate names, as they appear in verdict reasons.
namespace predicate {
inline constexpr std::string_view kCorrectFormat = "isCorrectFormat";
inline constexpr std::string_view kHasAllSignature = "hasAllSignature";
inline constexpr std::string_view kCastOnTime = "isCastOnTime";
inline constexpr std::string_view kNotCounted = "hasNotBeenCounted";
}  // namespace predicate

// Everything a validator needs from the genesis and schedule blocks.
struct ElectionRules {
  struct Window {
    Timestamp st = 0;
    Timestamp et = 0;
  };

  Timestamp start = 0;
  Timestamp end = 0;
  Duration grace = 0;
  std::size_t ballot_bits = 0;
  unsigned difficulty = 0;
  std::unordered_set<Digest> registered;
  std::unordered_map<Digest, Window> windows;

  /// Throws Error when the chain lacks a genesis or schedule block.
  static ElectionRules from_chain(const ChainState& chain);

  /// Inside the voter's group window or the grace window, and inside [ST, ET+grace).
  bool cast_on_time(const Digest& voter, Timestamp at) const;
};

// Digests and ballot numbers already admitted.
struct CountedState {
  std::unordered_set<Digest> digests;
  std::unordered_set<std::uint64_t> ballot_numbers;

  void record(const Ballot& ballot) {
    digests.insert(ballot.voter_digest);
    ballot_numbers.insert(ballot.ballot_number);
  }
};

/// The four validity predicates over a proposed ballot block, without
/// chain-link checks. Returns the names of failed predicates, in order.
std::vector<std::string> failed_predicates(const Block& block, const ElectionRules& rules,
                                           const CountedState& counted, Timestamp now);

struct Verdict {
  std::size_t peer_id = 0;
  bool accept = false;
  std::vector<std::string> reasons;
  bool operator==(const Verdict&) const = default;
};

class PeerNode {
 public:
  PeerNode(std::size_t id, PeerPolicy policy) : id_(id), policy_(policy) {}

  std::size_t id() const { return id_; }
  PeerPolicy policy() const { return policy_; }
  bool honest() const { return policy_ == PeerPolicy::honest; }

  const ChainState& chain() const { return chain_; }
  const CountedState& counted() const { return counted_; }

  Verdict validate_ballot_block(const Block& block, Timestamp now) const;
  Verdict validate_sibling_block(const Block& block) const;

  /// Throws LinkError when the block does not extend the local tip.
  void append(Block block);
  void tamper_bit(std::uint64_t ref, std::size_t bit) { chain_.tamper_bit(ref, bit); }

 private:
  Verdict policy_verdict() const;
  std::vector<std::string> link_failures(const Block& block) const;

  std::size_t id_;
  PeerPolicy policy_;
  ChainState chain_;
  CountedState counted_;
  std::optional<ElectionRules> rules_;
};

Verdict validate_ballot_block(const PeerNode& peer, const Block& block, Timestamp now);

struct ProposalOutcome {
  bool accepted = false;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  std::vector<Verdict> verdicts;  // sorted by peer_id
};

/// Strict majority: ties discard.
constexpr bool majority_accepts(std::size_t accepts, std::size_t peers) {
  return 2 * accepts > peers;
}

// The simulated peer set. Every peer keeps its own chain; an accepted
// block is appended everywhere.
class Network {
 public:
  /// Throws ParameterError for an empty peer list.
  explicit Network(const std::vector<PeerPolicy>& policies);

  /// Validate verdicts on one worker per peer. Output is identical either way.
  void set_parallel(bool parallel) { parallel_ = parallel; }
  bool parallel() const { return parallel_; }

  /// Appends an organizer block (genesis, schedule) on every peer.
  void install(const Block& block);

  /// Collects verdicts and appends on strict majority. Throws
  /// DivergenceError if an accepting majority leaves some peer unable to append.
  ProposalOutcome propose(const Block& block, Timestamp now);

  std::span<const PeerNode> peers() const { return peers_; }
  const PeerNode& peer(std::size_t id) const { return peers_.at(id); }
  /// The first honest peer, or peer 0 when none is honest.
  const PeerNode& reference() const;
  const ChainState& chain() const { return reference().chain(); }

  bool honest_chains_identical() const;

  void tamper_bit(std::uint64_t ref, std::size_t bit);

 private:
  std::vector<Verdict> collect(const Block& block, Timestamp now) const;

  std::vector<PeerNode> peers_;
  bool parallel_ = false;
};

/// Independent audit: replays the validity predicates over every proposed ballot block
/// in proposal order and returns the ones that pass.
std::vector<Block> filter_valid_ballots(std::span<const Block> proposed, const ElectionRules& rules,
                                        Timestamp now);

struct BallotAudit {
  std::vector<std::uint64_t> valid;     // ballot numbers passing the predicates
  std::vector<std::uint64_t> on_chain;  // ballot numbers on the agreed chain
  std::vector<std::string> mismatches;
  bool matches() const { return mismatches.empty(); }
};

/// Compares filter_valid_ballots against the ballots on `chain`.
BallotAudit audit_ballots(std::span<const Block> proposed, const ChainState& chain, Timestamp now);

}  // namespace evote
