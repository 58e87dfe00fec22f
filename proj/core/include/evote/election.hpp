#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <variant>
#include <vector>

#include "evote/ballot.hpp"
#include "evote/chain.hpp"
#include "evote/consensus.hpp"
#include "evote/identity.hpp"
#include "evote/rng.hpp"
#include "evote/tally.hpp"

namespace evote {

struct ElectionConfig {
  Timestamp start = 0;  // ST
  Timestamp end = 0;    // ET
  Duration grace = 0;
  std::size_t group_count = 1;
  std::size_t ballot_bits = 32;
  unsigned difficulty = 8;
  std::vector<Nominee> nominees;
  std::uint64_t rng_seed = 0;
  Grid grid;
  Duration pin_ttl = PinAuthority::kDefaultTtl;

  /// Throws ParameterError on ST >= ET, negative grace, zero groups, odd N,
  /// difficulty above kMaxDifficulty or an empty nominee list.
  void validate() const;
};

// A random voter partition with its own disjoint voting window [st, et).
struct Group {
  int group_id = 0;
  std::vector<std::string> members;
  Timestamp st = 0;
  Timestamp et = 0;
  std::optional<Timestamp> completed_at;  // when the last member voted

  /// Open inside the window until every member has voted.
  bool flag(Timestamp now) const;
  bool contains(std::string_view nid) const;
};

/// Mines block 0 carrying the registry, the code plan and the election window.
/// Throws IntegrityError for an empty registry, ParameterError for a bad config.
Block build_genesis(const ElectionConfig& config, const Registry& registry, Timestamp at);

/// Shuffles voters, splits them into near-equal groups, slices [ST, ET) into
/// equal windows and notifies every member. Throws ParameterError when there
/// are more groups than voters or than seconds in the election.
std::vector<Group> partition_groups(const Registry& registry, const ElectionConfig& config, Rng& rng,
                                    NotificationSink& sink, Timestamp now);

ScheduleRecord make_schedule(std::span<const Group> groups, const Registry& registry);

enum class Phase { pre_voting, voting, grace, reveal, closed };

std::string_view to_string(Phase phase);

enum class Condition1Failure { not_eligible, window_closed, already_voted };

std::string_view to_string(Condition1Failure failure);

struct FingerprintCredential {
  CellSet sample;
};

struct PinCredential {
  PinChallenge challenge;
  std::string pin;
};

using Credential = std::variant<FingerprintCredential, PinCredential>;

enum class SiblingFault { none, withhold, corrupt_opening };

struct VoteRequest {
  std::string nid;
  Credential credential;
  std::string nominee_id;
  SiblingFault fault = SiblingFault::none;
};

enum class CastStage { phase, condition1, identity, ballot, consensus };

std::string_view to_string(CastStage stage);

struct CastResult {
  bool accepted = false;
  CastStage stage = CastStage::consensus;
  std::string reason;
  std::optional<std::uint64_t> ballot_number;
  std::optional<std::uint64_t> ref;
  std::optional<ProposalOutcome> proposal;
};

// One ballot block offered to the peers, accepted or not.
struct ProposalRecord {
  Timestamp at = 0;
  std::uint64_t ballot_number = 0;
  Block block;
  ProposalOutcome outcome;
  bool grace = false;
};

struct RevealRecord {
  std::uint64_t broadcast_ref = 0;
  Block block;
  ProposalOutcome outcome;
};

// The three-phase election over a simulated peer network. Single writer:
// every mutating call runs to completion before the next.
class Election {
 public:
  Election(ElectionConfig config, Registry registry, const std::vector<PeerPolicy>& peers);

  Election(const Election&) = delete;
  Election& operator=(const Election&) = delete;

  Phase phase() const { return phase_; }
  Timestamp clock() const { return clock_; }

  /// Moves the logical clock forward, firing phase transitions at ST, ET
  /// (grace notifications) and ET+grace. Throws PhaseError when moving back.
  void advance_to(Timestamp t);

  /// Condition 1 for the current clock.
  std::optional<Condition1Failure> check_condition1(std::string_view nid) const;

  /// Issues a PIN challenge to the voter's contact.
  PinChallenge request_pin(std::string_view nid);

  CastResult cast_vote(const VoteRequest& request);

  /// A modified client that skips Condition 1 and identity checks and sends
  /// its ballot straight to the peers. The digest comes from the registry
  /// when `nid` is registered, otherwise from `fingerprint`.
  CastResult cast_rogue(std::string_view nid, const std::optional<CellSet>& fingerprint,
                        std::string_view nominee_id, SiblingFault fault = SiblingFault::none);

  /// Notifies every registered non-voter once the clock has reached ET.
  /// Returns the notified NIDs; a second call returns the same list.
  std::vector<std::string> close_and_grace();

  /// Releases every sibling in broadcast_ref order, lets each peer tally
  /// its own chain and checks honest peers agree. Throws PhaseError before
  /// the reveal phase (or before everyone voted), DivergenceError on disagreement.
  std::vector<Tally> reveal_and_tally();

  /// Flips one stored bit of block `ref` on every peer.
  void tamper(std::uint64_t ref, std::size_t bit);

  bool all_voted() const { return voted_.size() == registry_.size(); }
  bool has_voted(std::string_view nid) const { return voted_.contains(std::string(nid)); }

  const ElectionConfig& config() const { return config_; }
  const Registry& registry() const { return registry_; }
  const CodePlan& plan() const { return plan_; }
  std::span<const Group> groups() const { return groups_; }
  const Group* group_of(std::string_view nid) const;
  Network& network() { return network_; }
  const Network& network() const { return network_; }
  const SiblingVault& vault() const { return vault_; }
  const NotificationSink& notifications() const { return sink_; }
  std::span<const ProposalRecord> proposals() const { return proposals_; }
  std::span<const RevealRecord> reveals() const { return reveals_; }
  const std::vector<std::string>& grace_notified() const { return grace_notified_; }

 private:
  CastResult propose_ballot(const VoterRecord* voter, const Digest& digest, std::string_view nominee_id,
                            SiblingFault fault);
  void enter_grace();
  void mark_voted(const VoterRecord& voter);

  ElectionConfig config_;
  Registry registry_;
  CodePlan plan_;
  Rng rng_;
  Network network_;
  SiblingVault vault_;
  NotificationSink sink_;
  PinAuthority pins_;
  std::vector<Group> groups_;
  std::unordered_map<std::string, std::size_t> group_index_;
  Phase phase_ = Phase::pre_voting;
  Timestamp clock_ = 0;
  std::uint64_t next_ballot_number_ = 1;
  std::unordered_set<std::string> voted_;
  std::vector<std::string> grace_notified_;
  std::unordered_set<std::string> grace_authorized_;
  bool grace_done_ = false;
  std::vector<ProposalRecord> proposals_;
  std::vector<RevealRecord> reveals_;
};

}  // namespace evote
