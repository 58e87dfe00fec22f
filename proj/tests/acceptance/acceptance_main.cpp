// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "evote/ballot.hpp"
#include "evote/chain.hpp"
#include "evote/consensus.hpp"
#include "evote/election.hpp"
#include "evote/error.hpp"
#include "evote/runner.hpp"
#include "evote/scenario.hpp"
#include "evote/tally.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

namespace {

using namespace evote;
using Clock = std::chrono::steady_clock;

// Tolerances from the acceptance criteria.
constexpr double kRoundTripBudgetS = 5.0;
constexpr double kSupportBudgetS = 60.0;
constexpr double kScaleBudgetS = 30.0;
constexpr int kRoundTripCases = 10000;
constexpr int kOracleScenarios = 24;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

#define CHECK_OR_FAIL(cond, msg)   \
  do {                             \
    if (!(cond)) return {false, msg}; \
  } while (0)

// ---------------------------------------------------------------------------
// Scripted scenarios

enum class StepKind { vote, rogue_registered, rogue_stranger };

struct Step {
  Timestamp at = 0;
  StepKind kind = StepKind::vote;
  std::size_t voter = 0;
  std::string nominee;
  SiblingFault fault = SiblingFault::none;
};

struct Script {
  std::string name;
  ElectionConfig config;
  std::size_t voters = 0;
  std::vector<PeerPolicy> peers;
  // Steps are relative to group windows until resolved against an election.
  std::function<std::vector<Step>(const Election&)> steps;
};

struct ScriptRun {
  std::vector<Block> proposed;
  std::map<std::uint64_t, std::string> intended;  // ballot number -> nominee
  std::set<std::uint64_t> withheld;
  std::vector<std::uint64_t> rejected_refs;       // refs of discarded ballot proposals
  std::string chain_before_reveal;
  bool vault_clean = true;                         // no sibling held for a discarded ballot
  Timestamp now = 0;
  std::vector<Tally> tallies;
  bool diverged = false;
  std::string divergence;
};

Registry registry_for(const Script& s) { return Registry(testing::make_voters(s.voters, s.config.grid), s.config.grid); }

ScriptRun execute(const Script& script, Election& e) {
  ScriptRun run;
  std::vector<Step> steps = script.steps(e);
  std::stable_sort(steps.begin(), steps.end(), [](const Step& a, const Step& b) { return a.at < b.at; });
  for (const Step& step : steps) {
    e.advance_to(std::max(step.at, e.clock()));
    const std::size_t proposals_before = e.proposals().size();
    CastResult r;
    const std::string nid = testing::nid_of(step.voter);
    switch (step.kind) {
      case StepKind::vote: {
        const VoterRecord* v = e.registry().find_by_nid(nid);
        r = e.cast_vote(VoteRequest{nid, FingerprintCredential{v->coordinates}, step.nominee, step.fault});
        break;
      }
      case StepKind::rogue_registered:
        r = e.cast_rogue(nid, std::nullopt, step.nominee, step.fault);
        break;
      case StepKind::rogue_stranger: {
        CellSet stranger{{e.config().grid.rows - 1, e.config().grid.cols - 1},
                         {e.config().grid.rows - 2, static_cast<int>(step.voter % 3)}};
        r = e.cast_rogue("stranger-" + std::to_string(step.voter), stranger, step.nominee, step.fault);
        break;
      }
    }
    if (e.proposals().size() > proposals_before) {
      const ProposalRecord& p = e.proposals().back();
      run.proposed.push_back(p.block);
      run.intended[p.ballot_number] = step.nominee;
      if (!p.outcome.accepted) {
        run.rejected_refs.push_back(p.block.header.ref_number);
        if (e.vault().contains(p.block.header.ref_number)) run.vault_clean = false;
      } else if (step.fault == SiblingFault::withhold) {
        run.withheld.insert(p.ballot_number);
      }
    }
  }
  const Timestamp reveal_at = e.config().end + e.config().grace;
  e.advance_to(std::max(reveal_at, e.clock()));
  run.now = e.clock();
  run.chain_before_reveal = e.network().chain().to_text();
  try {
    run.tallies = e.reveal_and_tally();
  } catch (const DivergenceError& err) {
    run.diverged = true;
    run.divergence = err.what();
  }
  return run;
}

ElectionConfig script_config(std::size_t nominees, std::size_t groups, std::size_t bits, std::uint64_t seed) {
  ElectionConfig c = testing::basic_config(nominees, groups);
  c.ballot_bits = bits;
  c.rng_seed = seed;
  return c;
}

const std::vector<std::vector<PeerPolicy>>& honest_majority_mixes() {
  using P = PeerPolicy;
  static const std::vector<std::vector<PeerPolicy>> mixes{
      {P::honest, P::honest, P::honest},
      {P::honest, P::honest, P::honest, P::honest, P::honest},
      {P::honest, P::honest, P::honest, P::always_reject},
      {P::honest, P::honest, P::honest, P::always_reject, P::always_reject},
      {P::honest, P::honest, P::honest, P::honest, P::honest, P::always_reject, P::always_reject},
      {P::always_reject, P::honest, P::always_accept, P::honest, P::honest},
      {P::honest, P::honest, P::honest, P::honest, P::always_accept, P::always_reject, P::always_accept},
  };
  return mixes;
}

// A randomized script: most voters vote once in their own window; some
// vote twice, some abstain until grace, some cast late or out-of-window
// rogue ballots, strangers try to vote, and one client may withhold.
Script random_script(std::uint64_t seed) {
  Rng pick(seed * 7919 + 11);
  Script s;
  s.name = "random-" + std::to_string(seed);
  const std::size_t nominees = 1 + pick.below(6);
  s.voters = 4 + pick.below(12);
  const std::size_t groups = 1 + pick.below(std::min<std::size_t>(4, s.voters));
  s.config = script_config(nominees, groups, pick.bit() ? 16 : 32, seed);
  s.peers = honest_majority_mixes()[pick.below(honest_majority_mixes().size())];
  const std::uint64_t step_seed = pick.next();
  s.steps = [step_seed, nominees](const Election& e) {
    Rng rng(step_seed);
    std::vector<Step> steps;
    const auto nominee = [&] { return std::string(1, static_cast<char>('A' + rng.below(nominees))); };
    const ElectionConfig& c = e.config();
    const std::size_t n = e.registry().size();
    for (std::size_t v = 0; v < n; ++v) {
      const Group* g = e.group_of(testing::nid_of(v));
      const Duration len = g->et - g->st;
      const std::uint64_t roll = rng.below(100);
      if (roll < 70) {
        const Timestamp at = g->st + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(len)));
        const SiblingFault fault = rng.below(12) == 0 ? SiblingFault::withhold : SiblingFault::none;
        steps.push_back({at, StepKind::vote, v, nominee(), fault});
        if (rng.below(5) == 0) {
          // Double vote: through the client inside the window or as a rogue later.
          const Timestamp again = at + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(g->et - at)));
          steps.push_back({again, rng.bit() ? StepKind::vote : StepKind::rogue_registered, v, nominee()});
        }
      } else if (roll < 80 && c.grace > 0) {
        steps.push_back({c.end + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(c.grace))),
                         StepKind::vote, v, nominee()});
      } else if (roll < 88) {
        steps.push_back({c.end + c.grace + static_cast<Timestamp>(rng.below(50)), StepKind::rogue_registered, v,
                         nominee()});
      } else if (roll < 94 && e.groups().size() > 1) {
        // Out-of-window rogue ballot during another group's window.
        for (const Group& other : e.groups()) {
          if (other.group_id != g->group_id) {
            steps.push_back({other.st, StepKind::rogue_registered, v, nominee()});
            break;
          }
        }
      }
    }
    const std::size_t strangers = rng.below(3);
    for (std::size_t i = 0; i < strangers; ++i) {
      steps.push_back({c.start + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(c.end - c.start))),
                       StepKind::rogue_stranger, i, nominee()});
    }
    return steps;
  };
  return s;
}

// Five voters with one double vote and one late vote.
Script double_and_late_script() {
  Script s;
  s.name = "double-and-late";
  s.config = script_config(3, 1, 32, 99);
  s.voters = 5;
  s.peers = std::vector<PeerPolicy>(5, PeerPolicy::honest);
  s.steps = [](const Election& e) {
    const Group& g = e.groups()[0];
    return std::vector<Step>{{g.st + 1, StepKind::vote, 0, "A"},
                             {g.st + 2, StepKind::vote, 1, "B"},
                             {g.st + 3, StepKind::vote, 2, "A"},
                             {g.st + 4, StepKind::rogue_registered, 0, "C"},
                             {e.config().end + e.config().grace + 1, StepKind::rogue_registered, 3, "C"}};
  };
  return s;
}

std::vector<std::uint64_t> numbers_of(const std::vector<Block>& blocks) {
  std::vector<std::uint64_t> out;
  for (const Block& b : blocks) out.push_back(std::get<Ballot>(b.decode()).ballot_number);
  return out;
}

std::vector<std::uint64_t> chain_ballot_numbers(const ChainState& chain) {
  std::vector<std::uint64_t> out;
  for (const Block& b : chain.blocks()) {
    if (b.kind() == PayloadKind::ballot) out.push_back(std::get<Ballot>(b.decode()).ballot_number);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Criteria

Outcome ac1_round_trip() {
  const auto t0 = Clock::now();
  Rng pick(20240101);
  int failures = 0;
  for (int i = 0; i < kRoundTripCases; ++i) {
    const std::size_t k = 1 + pick.below(26);
    const CodePlan plan = assign_codes(testing::nominees(k));
    const std::size_t n = 2 * plan.code_bits + 2 * pick.below(64);
    const NomineeCode& chosen = plan.codes[pick.below(k)];
    Rng rng(pick.next());
    const EncodedBallot enc = encode_ballot(chosen.code, n, rng);
    if (decode_choice(enc.bits, enc.opening, plan) != chosen.nominee_id) ++failures;
  }
  const double elapsed = seconds_since(t0);
  char buf[128];
  std::snprintf(buf, sizeof buf, "%d cases, %d failures, %.3f s (limit %.0f s)", kRoundTripCases, failures, elapsed,
                kRoundTripBudgetS);
  return {failures == 0 && elapsed < kRoundTripBudgetS, buf};
}

// Steps i-iii applied literally: a 16-bit string whose choice half is all
// filler, with code bit i written at index V_c[i], then the random half.
std::string hand_encode(const std::string& code, const std::vector<std::size_t>& vc, char filler,
                        const std::string& random_half) {
  std::string choice(random_half.size(), filler);
  for (std::size_t i = 0; i < code.size(); ++i) choice[vc[i]] = code[i];
  return choice + random_half;
}

Outcome ac2_worked_example() {
  const std::vector<std::size_t> vc{4, 5, 7, 0};
  const std::string pinned = "0111111001100101";
  const std::string derived = hand_encode("1100", vc, '1', "01100101");
  CHECK_OR_FAIL(derived == pinned, "hand derivation gave " + derived);
  const EncodedBallot enc = encode_ballot("1100", 16, BallotDraws{OpeningValue{vc}, true, "01100101"});
  CHECK_OR_FAIL(enc.bits == pinned, "encode gave " + enc.bits);
  const CodePlan plan = assign_codes(testing::nominees(6));
  CHECK_OR_FAIL(plan.codes[0].code == "1100", "plan does not map A to 1100");
  const std::string decoded = decode_choice(enc.bits, OpeningValue{vc}, plan);
  CHECK_OR_FAIL(decoded == "A", "decode gave " + decoded);
  return {true, "encode(1100, V_c=(4,5,7,0), filler 1, 01100101) = " + pinned + ", decodes to A"};
}

Outcome ac3_support_equality() {
  const auto t0 = Clock::now();
  const std::size_t n_bits = 16;
  const CodePlan plan = assign_codes(testing::nominees(6));  // every weight-2 4-bit code
  const auto tuples = testing::oracle::ordered_tuples(n_bits / 2, plan.code_bits);
  CHECK_OR_FAIL(tuples.size() == 1680, "expected 1680 ordered tuples");

  std::vector<std::set<std::string>> supports;
  for (const NomineeCode& nc : plan.codes) {
    std::set<std::string> reach;
    for (const auto& t : tuples) {
      for (bool filler : {false, true}) {
        for (unsigned nonce = 0; nonce < 16; ++nonce) {
          std::string half = "0000";
          for (int b = 3; b >= 0; --b) half.push_back(((nonce >> b) & 1u) ? '1' : '0');
          reach.insert(encode_ballot(nc.code, n_bits, BallotDraws{OpeningValue{t}, filler, half}).bits);
        }
      }
    }
    supports.push_back(std::move(reach));
  }
  for (const auto& s : supports) CHECK_OR_FAIL(s == supports[0], "reachable sets differ between nominees");
  CHECK_OR_FAIL(supports[0].size() == 896, "expected 896 reachable strings, got " + std::to_string(supports[0].size()));

  // Every reachable string opens to every nominee under some tuple.
  for (const std::string& bits : supports[0]) {
    std::set<std::string> openable;
    for (const auto& t : tuples) {
      const std::string code = testing::oracle::read_positions(bits, t);
      if (auto who = plan.nominee_for(code)) openable.insert(*who);
      if (openable.size() == plan.codes.size()) break;
    }
    CHECK_OR_FAIL(openable.size() == plan.codes.size(), "string " + bits + " is not ambiguous");
  }
  const double elapsed = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "6 nominees share one support of 896 strings; all ambiguous; %.2f s (limit %.0f s)",
                elapsed, kSupportBudgetS);
  return {elapsed < kSupportBudgetS, buf};
}

std::vector<Script> oracle_scripts() {
  std::vector<Script> scripts{double_and_late_script()};
  for (std::uint64_t seed = 1; scripts.size() < kOracleScenarios; ++seed) scripts.push_back(random_script(seed));
  return scripts;
}

Outcome ac4_oracle_equivalence() {
  std::size_t proposals = 0, valid_total = 0;
  std::set<std::string> reasons_seen;
  for (const Script& script : oracle_scripts()) {
    Election e(script.config, registry_for(script), script.peers);
    const ScriptRun run = execute(script, e);
    CHECK_OR_FAIL(!run.diverged, script.name + ": " + run.divergence);

    const auto rules = ElectionRules::from_chain(e.network().chain());
    const auto filtered = numbers_of(filter_valid_ballots(run.proposed, rules, run.now));
    const auto oracle = testing::oracle::valid_ballot_numbers(run.proposed, testing::oracle::facts_of(e), run.now);
    const auto on_chain = chain_ballot_numbers(e.network().chain());
    CHECK_OR_FAIL(filtered == oracle, script.name + ": filter disagrees with the oracle");
    CHECK_OR_FAIL(filtered == on_chain, script.name + ": filter disagrees with the chain");

    // End to end: intended choices of oracle-valid ballots, minus withheld.
    std::map<std::string, std::uint64_t> expected;
    for (const auto& nc : e.plan().codes) expected[nc.nominee_id] = 0;
    for (std::uint64_t number : oracle) {
      if (!run.withheld.contains(number)) ++expected[run.intended.at(number)];
    }
    for (const Tally& t : run.tallies) {
      for (const auto& [id, count] : t.counts) {
        CHECK_OR_FAIL(expected[id] == count, script.name + ": tally for " + id + " differs from intended choices");
      }
    }
    for (const ProposalRecord& p : e.proposals()) {
      for (const Verdict& v : p.outcome.verdicts) reasons_seen.insert(v.reasons.begin(), v.reasons.end());
    }
    proposals += run.proposed.size();
    valid_total += oracle.size();
  }
  for (auto name : {predicate::kHasAllSignature, predicate::kCastOnTime, predicate::kNotCounted}) {
    CHECK_OR_FAIL(reasons_seen.contains(std::string(name)), "no scenario exercised " + std::string(name));
  }
  return {true, std::to_string(kOracleScenarios) + " scenarios, " + std::to_string(proposals) + " proposals, " +
                    std::to_string(valid_total) + " valid; filter == oracle == chain"};
}

Outcome ac5_convergence() {
  std::size_t checked = 0;
  std::vector<Script> scripts = oracle_scripts();
  Script seven = random_script(501);
  seven.name = "seven-peers-two-byzantine";
  seven.peers = {PeerPolicy::honest, PeerPolicy::always_reject, PeerPolicy::honest, PeerPolicy::honest,
                 PeerPolicy::always_accept, PeerPolicy::honest, PeerPolicy::honest};
  scripts.push_back(seven);
  for (const Script& script : scripts) {
    Election e(script.config, registry_for(script), script.peers);
    const ScriptRun run = execute(script, e);
    CHECK_OR_FAIL(!run.diverged, script.name + ": " + run.divergence);
    CHECK_OR_FAIL(e.network().honest_chains_identical(), script.name + ": honest chains differ");
    const std::string reference = e.network().chain().to_text();
    std::size_t honest_tallies = 0;
    for (std::size_t i = 0; i < e.network().peers().size(); ++i) {
      const PeerNode& peer = e.network().peer(i);
      if (!peer.honest()) continue;
      CHECK_OR_FAIL(peer.chain().to_text() == reference, script.name + ": honest chain bytes differ");
      CHECK_OR_FAIL(run.tallies[i].same_result(run.tallies[e.network().reference().id()]),
                    script.name + ": honest tallies differ");
      ++honest_tallies;
    }
    CHECK_OR_FAIL(honest_tallies * 2 > e.network().peers().size(), script.name + ": not an honest majority");
    ++checked;
  }

  // Three of five peers reject everything: valid ballots are discarded.
  Script hostile = double_and_late_script();
  hostile.peers = {PeerPolicy::honest, PeerPolicy::always_reject, PeerPolicy::honest, PeerPolicy::always_reject,
                   PeerPolicy::always_reject};
  Election e(hostile.config, registry_for(hostile), hostile.peers);
  const ScriptRun run = execute(hostile, e);
  const auto oracle = testing::oracle::valid_ballot_numbers(run.proposed, testing::oracle::facts_of(e), run.now);
  CHECK_OR_FAIL(!oracle.empty(), "hostile scenario proposed no valid ballots");
  for (const PeerNode& peer : e.network().peers()) {
    CHECK_OR_FAIL(peer.chain().size() == 2, "a peer holds blocks beyond genesis and schedule");
  }
  CHECK_OR_FAIL(run.tallies.size() == 5 && run.tallies[0].counted() == 0, "hostile tally is not empty");
  return {true, std::to_string(checked) + " honest-majority scenarios converge (incl. 7 peers / 2 byzantine); 5 peers / 3 "
                "reject leaves genesis + schedule only after " + std::to_string(oracle.size()) +
                    " valid ballots were discarded"};
}

// A 10-block election chain: genesis, schedule, 4 ballots, 4 siblings.
ChainState ten_block_chain() {
  ElectionConfig config = testing::basic_config(3, 1);
  Election e(config, Registry(testing::make_voters(4), config.grid), {PeerPolicy::honest});
  testing::cast_in_windows(e, {{0, "A", 1}, {1, "B", 2}, {2, "C", 3}, {3, "A", 4}});
  e.reveal_and_tally();
  return e.network().chain();
}

Outcome ac6_tamper_detection() {
  const ChainState chain = ten_block_chain();
  const unsigned difficulty = chain.genesis()->difficulty;
  CHECK_OR_FAIL(chain.size() == 10, "chain has " + std::to_string(chain.size()) + " blocks");
  CHECK_OR_FAIL(verify_chain(chain, difficulty).ok, "untampered chain does not verify");
  std::size_t mutations = 0, detected = 0;
  std::string first_miss;
  for (std::uint64_t ref = 0; ref < chain.size(); ++ref) {
    const std::size_t bits = (BlockHeader::kEncodedSize + chain.at(ref).payload.size()) * 8;
    for (std::size_t bit = 0; bit < bits; ++bit) {
      ChainState copy = chain;
      copy.tamper_bit(ref, bit);
      const ChainVerdict v = verify_chain(copy, difficulty);
      ++mutations;
      if (!v.ok && v.at <= ref + 1) {
        ++detected;
      } else if (first_miss.empty()) {
        first_miss = "block " + std::to_string(ref) + " bit " + std::to_string(bit);
      }
    }
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu/%zu single-bit mutations detected at or before the successor%s%s", detected,
                mutations, first_miss.empty() ? "" : "; first miss: ", first_miss.c_str());
  return {detected == mutations, buf};
}

Outcome ac7_sibling_discipline() {
  // Discarded ballots leave nothing in the vault.
  Script hostile = double_and_late_script();
  hostile.peers = {PeerPolicy::always_reject, PeerPolicy::honest, PeerPolicy::always_reject};
  Election rejected(hostile.config, registry_for(hostile), hostile.peers);
  const ScriptRun r1 = execute(hostile, rejected);
  CHECK_OR_FAIL(!r1.rejected_refs.empty(), "no ballot was discarded");
  CHECK_OR_FAIL(r1.vault_clean, "a discarded ballot left a sibling in the vault");

  std::size_t scenarios = 0, discarded = 0;
  for (const Script& script : oracle_scripts()) {
    Election e(script.config, registry_for(script), script.peers);
    const ScriptRun run = execute(script, e);
    CHECK_OR_FAIL(run.vault_clean, script.name + ": discarded ballot kept its sibling");
    // Before reveal the chain holds no sibling blocks, so no opening values.
    const ChainState before = ChainState::from_text(run.chain_before_reveal);
    for (const Block& b : before.blocks()) {
      CHECK_OR_FAIL(b.kind() != PayloadKind::sibling, script.name + ": opening value on chain before reveal");
    }
    discarded += run.rejected_refs.size();
    ++scenarios;
  }

  // Exactly one withheld sibling: one exclusion, other counts intact.
  ElectionConfig config = testing::basic_config(3, 1);
  Election e(config, Registry(testing::make_voters(5), config.grid), std::vector<PeerPolicy>(3, PeerPolicy::honest));
  const auto results = testing::cast_in_windows(
      e, {{0, "A", 1}, {1, "A", 2}, {2, "B", 3, SiblingFault::withhold}, {3, "C", 4}, {4, "A", 5}});
  for (const auto& r : results) CHECK_OR_FAIL(r.accepted, "fault scenario vote rejected: " + r.reason);
  const ChainState pre = ChainState::from_text(e.network().chain().to_text());
  for (const Block& b : pre.blocks()) {
    CHECK_OR_FAIL(b.kind() != PayloadKind::sibling, "opening value on chain before reveal");
  }
  const auto tallies = e.reveal_and_tally();
  for (const Tally& t : tallies) {
    CHECK_OR_FAIL(t.excluded.size() == 1 && t.excluded[0].ref == *results[2].ref, "withheld ballot not excluded alone");
    CHECK_OR_FAIL(t.count_for("A") == 3 && t.count_for("B") == 0 && t.count_for("C") == 1, "counts corrupted");
  }
  return {true, std::to_string(scenarios + 1) + " scenarios, " + std::to_string(discarded + r1.rejected_refs.size()) +
                    " discarded ballots with no vaulted sibling; no pre-reveal openings; withheld sibling excluded once"};
}

Outcome ac8_determinism() {
  std::vector<Scenario> scenarios;
  {
    Scenario s;
    s.config = testing::basic_config(4, 3);
    s.voters = testing::make_voters(12);
    s.peers = {PeerPolicy::honest, PeerPolicy::always_reject, PeerPolicy::honest, PeerPolicy::honest,
               PeerPolicy::always_accept};
    for (std::size_t v = 0; v < 12; ++v) {
      ScenarioAction a;
      a.window_offset = static_cast<Duration>(1 + v);
      a.actor = testing::nid_of(v);
      a.kind = v % 5 == 4 ? ActionKind::rogue_vote : ActionKind::vote;
      a.nominee = std::string(1, static_cast<char>('A' + v % 4));
      a.fault = v == 6 ? SiblingFault::withhold : SiblingFault::none;
      s.actions.push_back(a);
    }
    ScenarioAction late;
    late.at = s.config.end + s.config.grace + 3;
    late.actor = testing::nid_of(0);
    late.kind = ActionKind::rogue_vote;
    late.nominee = "B";
    s.actions.push_back(late);
    scenarios.push_back(s);
  }
  {
    Scenario s;
    s.config = testing::basic_config(2, 1);
    s.voters = testing::make_voters(5);
    s.peers = std::vector<PeerPolicy>(4, PeerPolicy::honest);
    for (std::size_t v = 0; v < 4; ++v) {
      ScenarioAction a;
      a.window_offset = 10;
      a.actor = testing::nid_of(v);
      a.kind = ActionKind::vote;
      a.nominee = v % 2 ? "A" : "B";
      s.actions.push_back(a);
    }
    scenarios.push_back(s);
  }
  std::size_t files = 0;
  for (const Scenario& s : scenarios) {
    const Scenario reparsed = parse_scenario(dump_scenario(s));
    const RunOutcome a = run_scenario(reparsed, {});
    const RunOutcome b = run_scenario(reparsed, {});
    const RunOutcome c = run_scenario(reparsed, RunOptions{std::nullopt, true});
    CHECK_OR_FAIL(a.exit_code == kExitOk, "scenario run failed");
    for (const RunOutcome* other : {&b, &c}) {
      CHECK_OR_FAIL(a.artifacts.chain == other->artifacts.chain, "chain files differ");
      CHECK_OR_FAIL(a.artifacts.tally == other->artifacts.tally, "tally files differ");
      CHECK_OR_FAIL(a.artifacts.report_json == other->artifacts.report_json, "structured reports differ");
      CHECK_OR_FAIL(a.artifacts.report_text == other->artifacts.report_text, "text reports differ");
      files += 4;
    }
  }
  return {true, std::to_string(scenarios.size()) + " scenarios x (repeat, parallel): " + std::to_string(files) +
                    " artifact comparisons byte-identical"};
}

Outcome ac9_scale() {
  const auto t0 = Clock::now();
  Scenario s;
  s.config = testing::basic_config(5, 10);
  s.config.start = 0;
  s.config.end = 100000;
  s.config.grace = 5000;
  s.voters = testing::make_voters(1000);
  s.peers = std::vector<PeerPolicy>(5, PeerPolicy::honest);
  Rng rng(77);
  for (std::size_t v = 0; v < 1000; ++v) {
    if (v % 50 == 49) continue;  // abstainers
    ScenarioAction a;
    a.window_offset = static_cast<Duration>(rng.below(9000));
    a.actor = testing::nid_of(v);
    a.kind = ActionKind::vote;
    a.nominee = std::string(1, static_cast<char>('A' + rng.below(5)));
    a.fault = v % 97 == 0 ? SiblingFault::withhold : SiblingFault::none;
    s.actions.push_back(a);
  }
  const RunOutcome out = run_scenario(s, {});
  const double elapsed = seconds_since(t0);
  CHECK_OR_FAIL(out.exit_code == kExitOk, "run failed");
  const ChainState chain = ChainState::from_text(out.artifacts.chain);
  const std::size_t accepted = chain.ballot_count();
  for (const Tally& t : out.tallies) {
    CHECK_OR_FAIL(t.counted() + t.excluded.size() == accepted,
                  "conservation fails on node " + std::to_string(t.node_id));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 voters, 10 groups, 5 peers: %zu ballots conserved on every node, %.2f s (limit %.0f s)",
                accepted, elapsed, kScaleBudgetS);
  return {out.tallies.size() == 5 && elapsed < kScaleBudgetS, buf};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"AC1 encode/decode round-trip", ac1_round_trip},
      {"AC2 worked-example fixture", ac2_worked_example},
      {"AC3 secrecy support equality", ac3_support_equality},
      {"AC4 validity oracle equivalence", ac4_oracle_equivalence},
      {"AC5 convergence", ac5_convergence},
      {"AC6 tamper detection", ac6_tamper_detection},
      {"AC7 sibling discipline", ac7_sibling_discipline},
      {"AC8 end-to-end determinism", ac8_determinism},
      {"AC9 scale", ac9_scale},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
