#include "evote/election.hpp"

#include <algorithm>

#include "evote/error.hpp"

namespace evote {

void ElectionConfig::validate() const {
  if (start >= end) throw ParameterError("election start must precede its end");
  if (grace < 0) throw ParameterError("grace duration must not be negative");
  if (group_count == 0) throw ParameterError("at least one group is required");
  if (ballot_bits == 0 || ballot_bits % 2 != 0) {
    throw ParameterError("ballot length must be a positive even number");
  }
  if (difficulty > kMaxDifficulty) {
    throw ParameterError("difficulty exceeds " + std::to_string(kMaxDifficulty));
  }
  if (nominees.empty()) throw ParameterError("at least one nominee is required");
  if (pin_ttl <= 0) throw ParameterError("PIN ttl must be positive");
}

bool Group::flag(Timestamp now) const {
  if (now < st || now >= et) return false;
  return !(completed_at && now >= *completed_at);
}

bool Group::contains(std::string_view nid) const {
  return std::find(members.begin(), members.end(), nid) != members.end();
}

Block build_genesis(const ElectionConfig& config, const Registry& registry, Timestamp at) {
  config.validate();
  if (registry.empty()) throw IntegrityError("the voter registry is empty");
  GenesisRecord record;
  record.start = config.start;
  record.end = config.end;
  record.grace = config.grace;
  record.ballot_bits = static_cast<std::uint32_t>(config.ballot_bits);
  record.difficulty = config.difficulty;
  record.grid = registry.grid();
  record.voters.assign(registry.voters().begin(), registry.voters().end());
  for (auto& v : record.voters) v.group_id.reset();
  record.plan = assign_codes(config.nominees);
  if (record.plan.code_bits > config.ballot_bits / 2) {
    throw ParameterError(std::to_string(config.nominees.size()) + " nominees need " +
                         std::to_string(record.plan.code_bits) + "-bit codes, more than half of a " +
                         std::to_string(config.ballot_bits) + "-bit ballot");
  }
  return mine_block(record, Digest{}, 0, at, config.difficulty);
}

std::vector<Group> partition_groups(const Registry& registry, const ElectionConfig& config, Rng& rng,
                                    NotificationSink& sink, Timestamp now) {
  const std::size_t voters = registry.size();
  const std::size_t g = config.group_count;
  if (g == 0 || g > voters) {
    throw ParameterError(std::to_string(g) + " groups cannot be formed from " + std::to_string(voters) + " voters");
  }
  const Timestamp span = config.end - config.start;
  if (span < static_cast<Timestamp>(g)) {
    throw ParameterError("election window is shorter than one second per group");
  }

  std::vector<std::string> nids;
  nids.reserve(voters);
  for (const auto& v : registry.voters()) nids.push_back(v.nid);
  rng.shuffle(nids);

  std::vector<std::size_t> slots(g);
  for (std::size_t i = 0; i < g; ++i) slots[i] = i;
  rng.shuffle(slots);

  const auto boundary = [&](std::size_t i) {
    // span * i / g without overflowing the product.
    const auto gs = static_cast<Timestamp>(g);
    const auto is = static_cast<Timestamp>(i);
    return config.start + (span / gs) * is + ((span % gs) * is) / gs;
  };

  std::vector<Group> groups(g);
  std::size_t next = 0;
  for (std::size_t i = 0; i < g; ++i) {
    Group& group = groups[i];
    group.group_id = static_cast<int>(i);
    const std::size_t size = voters / g + (i < voters % g ? 1 : 0);
    group.members.assign(nids.begin() + static_cast<std::ptrdiff_t>(next),
                         nids.begin() + static_cast<std::ptrdiff_t>(next + size));
    std::sort(group.members.begin(), group.members.end());
    next += size;
    group.st = boundary(slots[i]);
    group.et = boundary(slots[i] + 1);
    for (const auto& nid : group.members) {
      const VoterRecord* voter = registry.find_by_nid(nid);
      sink.notify(now, voter->contact,
                  "You are in group " + std::to_string(group.group_id) + "; voting opens at " +
                      std::to_string(group.st) + " and closes at " + std::to_string(group.et));
    }
  }
  return groups;
}

ScheduleRecord make_schedule(std::span<const Group> groups, const Registry& registry) {
  ScheduleRecord schedule;
  for (const auto& group : groups) {
    GroupWindow window{group.group_id, group.st, group.et, {}};
    for (const auto& nid : group.members) {
      const VoterRecord* voter = registry.find_by_nid(nid);
      if (voter == nullptr) throw ValidationError("group member " + nid + " is not registered");
      window.members.push_back(registry.digest_of(*voter));
    }
    schedule.groups.push_back(std::move(window));
  }
  return schedule;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::pre_voting: return "pre-voting";
    case Phase::voting: return "voting";
    case Phase::grace: return "grace";
    case Phase::reveal: return "reveal";
    case Phase::closed: return "closed";
  }
  return "unknown";
}

std::string_view to_string(Condition1Failure failure) {
  switch (failure) {
    case Condition1Failure::not_eligible: return "not-eligible";
    case Condition1Failure::window_closed: return "window-closed";
    case Condition1Failure::already_voted: return "already-voted";
  }
  return "unknown";
}

std::string_view to_string(CastStage stage) {
  switch (stage) {
    case CastStage::phase: return "phase";
    case CastStage::condition1: return "condition1";
    case CastStage::identity: return "identity";
    case CastStage::ballot: return "ballot";
    case CastStage::consensus: return "consensus";
  }
  return "unknown";
}

namespace {

CastResult rejected(CastStage stage, std::string reason) {
  CastResult r;
  r.accepted = false;
  r.stage = stage;
  r.reason = std::move(reason);
  return r;
}

}  // namespace

Election::Election(ElectionConfig config, Registry registry, const std::vector<PeerPolicy>& peers)
    : config_(std::move(config)),
      registry_(std::move(registry)),
      rng_(config_.rng_seed),
      network_(peers),
      pins_(config_.pin_ttl) {
  config_.validate();
  if (!(registry_.grid() == config_.grid)) {
    throw ParameterError("registry grid does not match the election grid");
  }
  clock_ = std::min<Timestamp>(0, config_.start);

  const Block genesis = build_genesis(config_, registry_, clock_);
  network_.install(genesis);
  plan_ = network_.chain().genesis()->plan;

  groups_ = partition_groups(registry_, config_, rng_, sink_, clock_);
  for (std::size_t i = 0; i < groups_.size(); ++i) {
    for (const auto& nid : groups_[i].members) {
      group_index_.emplace(nid, i);
      registry_.assign_group(nid, groups_[i].group_id);
    }
  }
  network_.install(mine_block(make_schedule(groups_, registry_), network_.chain().tip_hash(), 1, clock_,
                              config_.difficulty));
  advance_to(clock_);
}

const Group* Election::group_of(std::string_view nid) const {
  auto it = group_index_.find(std::string(nid));
  return it == group_index_.end() ? nullptr : &groups_[it->second];
}

void Election::advance_to(Timestamp t) {
  if (t < clock_) {
    throw PhaseError("the election clock only moves forward (" + std::to_string(clock_) + " -> " +
                     std::to_string(t) + ")");
  }
  if (phase_ == Phase::pre_voting && t >= config_.start) {
    phase_ = Phase::voting;
  }
  if (phase_ == Phase::voting && t >= config_.end) {
    clock_ = std::max(clock_, config_.end);
    enter_grace();
  }
  if (phase_ == Phase::grace && t >= config_.end + config_.grace) {
    phase_ = Phase::reveal;
  }
  clock_ = t;
}

void Election::enter_grace() {
  phase_ = Phase::grace;
  close_and_grace();
}

std::vector<std::string> Election::close_and_grace() {
  if (clock_ < config_.end) {
    throw PhaseError("voting has not ended yet");
  }
  if (grace_done_) return grace_notified_;
  grace_done_ = true;
  for (const auto& voter : registry_.voters()) {
    if (voted_.contains(voter.nid)) continue;
    grace_notified_.push_back(voter.nid);
    grace_authorized_.insert(voter.nid);
    sink_.notify(config_.end, voter.contact,
                 "Voting has ended; you may still cast your vote until " +
                     std::to_string(config_.end + config_.grace));
  }
  return grace_notified_;
}

std::optional<Condition1Failure> Election::check_condition1(std::string_view nid) const {
  if (registry_.find_by_nid(nid) == nullptr) return Condition1Failure::not_eligible;
  const bool in_grace = clock_ >= config_.end && clock_ < config_.end + config_.grace &&
                        grace_authorized_.contains(std::string(nid));
  if (!in_grace) {
    const Group* group = group_of(nid);
    if (group == nullptr || !group->flag(clock_)) return Condition1Failure::window_closed;
  }
  if (voted_.contains(std::string(nid))) return Condition1Failure::already_voted;
  return std::nullopt;
}

PinChallenge Election::request_pin(std::string_view nid) {
  return pins_.issue(registry_, nid, clock_, rng_, sink_);
}

CastResult Election::cast_vote(const VoteRequest& request) {
  if (phase_ == Phase::reveal || phase_ == Phase::closed) {
    return rejected(CastStage::phase, std::string(to_string(Condition1Failure::window_closed)));
  }
  if (phase_ != Phase::voting && phase_ != Phase::grace) {
    return rejected(CastStage::phase, "outside-voting-period");
  }
  // An already-voted session is not stopped here: the peers' double-vote
  // check decides it against the agreed chain.
  if (auto failure = check_condition1(request.nid);
      failure && *failure != Condition1Failure::already_voted) {
    return rejected(CastStage::condition1, std::string(to_string(*failure)));
  }
  const VoterRecord* voter = registry_.find_by_nid(request.nid);

  if (const auto* fp = std::get_if<FingerprintCredential>(&request.credential)) {
    const VoterRecord* match = registry_.match_fingerprint(fp->sample);
    if (match == nullptr || match->nid != voter->nid) {
      return rejected(CastStage::identity, "fingerprint-mismatch");
    }
  } else {
    const auto& pin = std::get<PinCredential>(request.credential);
    if (pin.challenge.nid != voter->nid) {
      return rejected(CastStage::identity, "pin-wrong-voter");
    }
    const PinOutcome outcome = pins_.verify(pin.challenge, pin.pin, clock_);
    if (outcome != PinOutcome::accepted) {
      return rejected(CastStage::identity, "pin-" + std::string(to_string(outcome)));
    }
  }
  return propose_ballot(voter, registry_.digest_of(*voter), request.nominee_id, request.fault);
}

CastResult Election::cast_rogue(std::string_view nid, const std::optional<CellSet>& fingerprint,
                                std::string_view nominee_id, SiblingFault fault) {
  if (phase_ == Phase::closed || vault_.reveal_open()) {
    return rejected(CastStage::phase, "reveal-started");
  }
  const VoterRecord* voter = registry_.find_by_nid(nid);
  Digest digest;
  if (voter != nullptr) {
    digest = registry_.digest_of(*voter);
  } else if (fingerprint) {
    try {
      digest = voter_digest(binarize_fingerprint(*fingerprint, registry_.grid()));
    } catch (const Error& e) {
      return rejected(CastStage::identity, e.what());
    }
    voter = registry_.find_by_digest(digest);
  } else {
    return rejected(CastStage::identity, "no-credential");
  }
  return propose_ballot(voter, digest, nominee_id, fault);
}

CastResult Election::propose_ballot(const VoterRecord* voter, const Digest& digest, std::string_view nominee_id,
                                    SiblingFault fault) {
  std::string code;
  try {
    code = plan_.code_for(nominee_id);
  } catch (const ValidationError&) {
    return rejected(CastStage::ballot, "unknown-nominee");
  }
  EncodedBallot encoded = encode_ballot(code, config_.ballot_bits, rng_);
  const std::uint64_t number = next_ballot_number_++;
  const ChainState& chain = network_.chain();
  const std::uint64_t ref = chain.next_ref();
  Block block = mine_block(Ballot{number, digest, encoded.bits}, chain.tip_hash(), ref, clock_, config_.difficulty);

  SiblingRecord sibling{digest, ref, 0, encoded.opening};
  if (fault == SiblingFault::corrupt_opening) {
    // Point every index into the random half; the reveal cannot decode.
    for (auto& index : sibling.opening.indexes) index += config_.ballot_bits / 2;
  }
  vault_.hold(sibling);

  ProposalOutcome outcome = network_.propose(block, clock_);
  proposals_.push_back(ProposalRecord{clock_, number, block, outcome, phase_ == Phase::grace});

  CastResult result;
  result.ballot_number = number;
  result.proposal = outcome;
  result.stage = CastStage::consensus;
  if (!outcome.accepted) {
    vault_.discard(ref);
    // Predicate failures from honest peers explain the rejection; policy
    // tags only when no honest peer rejected.
    std::vector<std::string> reasons;
    for (const auto& v : outcome.verdicts) {
      if (v.accept || network_.peer(v.peer_id).policy() != PeerPolicy::honest) continue;
      for (const auto& r : v.reasons) {
        if (std::find(reasons.begin(), reasons.end(), r) == reasons.end()) reasons.push_back(r);
      }
    }
    for (const auto& v : outcome.verdicts) {
      if (v.accept || !reasons.empty()) continue;
      for (const auto& r : v.reasons) {
        if (std::find(reasons.begin(), reasons.end(), r) == reasons.end()) reasons.push_back(r);
      }
    }
    for (const auto& r : reasons) {
      if (!result.reason.empty()) result.reason += ',';
      result.reason += r;
    }
    if (result.reason.empty()) result.reason = "majority-rejected";
    return result;
  }
  if (fault == SiblingFault::withhold) vault_.withdraw(ref);
  result.accepted = true;
  result.ref = ref;
  if (voter != nullptr) mark_voted(*voter);
  return result;
}

void Election::mark_voted(const VoterRecord& voter) {
  voted_.insert(voter.nid);
  auto it = group_index_.find(voter.nid);
  if (it == group_index_.end()) return;
  Group& group = groups_[it->second];
  if (group.completed_at) return;
  const bool done = std::all_of(group.members.begin(), group.members.end(),
                                [&](const std::string& m) { return voted_.contains(m); });
  if (done) group.completed_at = clock_;
}

std::vector<Tally> Election::reveal_and_tally() {
  if (phase_ == Phase::closed) {
    throw PhaseError("the election has already been tallied");
  }
  const bool early = (phase_ == Phase::voting || phase_ == Phase::grace) && all_voted();
  if (phase_ != Phase::reveal && !early) {
    throw PhaseError("reveal requires the grace period to have elapsed or every voter to have voted");
  }
  phase_ = Phase::reveal;
  vault_.open_reveal();
  for (SiblingRecord sibling : vault_.release()) {
    const ChainState& chain = network_.chain();
    sibling.own_ref = chain.next_ref();
    const std::uint64_t broadcast_ref = sibling.broadcast_ref;
    Block block = mine_block(sibling, chain.tip_hash(), sibling.own_ref, clock_, config_.difficulty);
    ProposalOutcome outcome = network_.propose(block, clock_);
    reveals_.push_back(RevealRecord{broadcast_ref, std::move(block), std::move(outcome)});
  }

  if (!network_.honest_chains_identical()) {
    throw DivergenceError("honest peers hold different chains after reveal");
  }
  std::vector<Tally> tallies;
  for (const auto& peer : network_.peers()) {
    tallies.push_back(compute_tally(peer.chain(), peer.id()));
  }
  const Tally* reference = nullptr;
  for (std::size_t i = 0; i < tallies.size(); ++i) {
    if (!network_.peers()[i].honest()) continue;
    if (reference == nullptr) {
      reference = &tallies[i];
    } else if (!reference->same_result(tallies[i])) {
      throw DivergenceError("peer " + std::to_string(i) + " computed a different tally from peer " +
                            std::to_string(reference->node_id));
    }
  }
  phase_ = Phase::closed;
  return tallies;
}

void Election::tamper(std::uint64_t ref, std::size_t bit) { network_.tamper_bit(ref, bit); }

}  // namespace evote
