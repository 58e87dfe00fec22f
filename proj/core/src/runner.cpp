#include "evote/runner.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "evote/consensus.hpp"
#include "evote/election.hpp"
#include "evote/error.hpp"
#include "report_render.hpp"

namespace evote {

using nlohmann::json;

namespace {

struct ResolvedAction {
  Timestamp at = 0;
  std::size_t index = 0;
  const ScenarioAction* action = nullptr;
};

json verdicts_json(const ProposalOutcome& outcome, const Network& network) {
  json out = json::array();
  for (const auto& v : outcome.verdicts) {
    out.push_back({{"peer", v.peer_id},
                   {"policy", std::string(to_string(network.peer(v.peer_id).policy()))},
                   {"accept", v.accept},
                   {"reasons", v.reasons}});
  }
  return out;
}

json tally_json(const Tally& tally, bool honest) {
  json counts = json::array();
  for (const auto& [id, count] : tally.counts) counts.push_back({{"nominee", id}, {"count", count}});
  json excluded = json::array();
  for (const auto& e : tally.excluded) {
    excluded.push_back({{"ballot_number", e.ballot_number}, {"ref", e.ref}, {"reason", e.reason}});
  }
  return {{"node", tally.node_id}, {"honest", honest}, {"counts", counts}, {"excluded", excluded},
          {"counted", tally.counted()}};
}

json cast_json(const CastResult& r) {
  json j = {{"outcome", r.accepted ? "accepted" : "rejected"}, {"stage", std::string(to_string(r.stage))}};
  if (!r.reason.empty()) j["reason"] = r.reason;
  if (r.ballot_number) j["ballot_number"] = *r.ballot_number;
  if (r.ref) j["ref"] = *r.ref;
  return j;
}

}  // namespace

RunOutcome run_scenario(const Scenario& scenario, const RunOptions& options) {
  RunOutcome result;
  ElectionConfig config = scenario.config;
  if (options.seed) config.rng_seed = *options.seed;

  Registry registry(scenario.voters, config.grid);
  Election election(config, std::move(registry), scenario.peers);
  election.network().set_parallel(options.parallel);

  std::vector<ResolvedAction> resolved;
  resolved.reserve(scenario.actions.size());
  for (std::size_t i = 0; i < scenario.actions.size(); ++i) {
    const ScenarioAction& a = scenario.actions[i];
    Timestamp at = a.at.value_or(0);
    if (a.window_offset) {
      const Group* group = election.group_of(a.actor);
      at = group->st + *a.window_offset;
    }
    resolved.push_back(ResolvedAction{at, i, &a});
  }
  std::stable_sort(resolved.begin(), resolved.end(),
                   [](const ResolvedAction& x, const ResolvedAction& y) { return x.at < y.at; });

  json actions_log = json::array();
  std::map<std::string, PinChallenge> challenges;
  for (const ResolvedAction& r : resolved) {
    const ScenarioAction& a = *r.action;
    json entry = {{"index", r.index}, {"at", r.at}, {"action", std::string(to_string(a.kind))}, {"actor", a.actor}};
    if (!a.nominee.empty()) entry["nominee"] = a.nominee;
    if (r.at < election.clock()) {
      entry["outcome"] = "rejected";
      entry["stage"] = "phase";
      entry["reason"] = "before-simulation-start";
      actions_log.push_back(std::move(entry));
      continue;
    }
    election.advance_to(r.at);

    switch (a.kind) {
      case ActionKind::vote: {
        const VoterRecord* voter = election.registry().find_by_nid(a.actor);
        VoteRequest request{a.actor, FingerprintCredential{a.fingerprint.value_or(voter->coordinates)}, a.nominee,
                            a.fault};
        entry.update(cast_json(election.cast_vote(request)));
        break;
      }
      case ActionKind::request_pin: {
        challenges[a.actor] = election.request_pin(a.actor);
        entry["outcome"] = "issued";
        break;
      }
      case ActionKind::vote_with_pin: {
        auto it = challenges.find(a.actor);
        PinChallenge challenge = it != challenges.end() ? it->second : election.request_pin(a.actor);
        if (it != challenges.end()) challenges.erase(it);
        VoteRequest request{a.actor, PinCredential{challenge, a.pin.value_or(challenge.pin)}, a.nominee, a.fault};
        entry.update(cast_json(election.cast_vote(request)));
        break;
      }
      case ActionKind::rogue_vote:
        entry.update(cast_json(election.cast_rogue(a.actor, a.fingerprint, a.nominee, a.fault)));
        break;
      case ActionKind::tamper:
        entry["block_ref"] = a.block_ref;
        entry["bit"] = a.bit;
        try {
          election.tamper(a.block_ref, a.bit);
          entry["outcome"] = "applied";
        } catch (const RangeError& e) {
          entry["outcome"] = "rejected";
          entry["reason"] = e.what();
        }
        break;
      case ActionKind::noop:
        entry["outcome"] = "noop";
        break;
    }
    actions_log.push_back(std::move(entry));
  }

  const bool early = election.all_voted() &&
                     (election.phase() == Phase::voting || election.phase() == Phase::grace);
  if (!early) {
    election.advance_to(std::max(election.clock(), config.end + config.grace));
  }
  bool diverged = false;
  try {
    result.tallies = election.reveal_and_tally();
  } catch (const DivergenceError& e) {
    diverged = true;
    result.exit_code = kExitFault;
    result.diagnostics.push_back(std::string("divergence: ") + e.what());
  }

  const Network& network = election.network();
  const ChainState& chain = network.chain();
  result.chain_verdict = verify_chain(chain, config.difficulty);
  if (!result.chain_verdict.ok) {
    result.exit_code = kExitFault;
    result.diagnostics.push_back("chain broken at block " + std::to_string(result.chain_verdict.at) + ": " +
                                 result.chain_verdict.reason);
  }

  std::vector<Block> proposed;
  for (const auto& p : election.proposals()) proposed.push_back(p.block);
  const BallotAudit audit = audit_ballots(proposed, chain, election.clock());

  // Artifacts.
  result.artifacts.chain = chain.to_text();
  result.artifacts.notifications = election.notifications().render();

  json tallies = json::array();
  for (const auto& t : result.tallies) tallies.push_back(tally_json(t, network.peer(t.node_id).honest()));

  json proposals = json::array();
  for (const auto& p : election.proposals()) {
    json j = {{"ballot_number", p.ballot_number},
              {"at", p.at},
              {"ref", p.block.header.ref_number},
              {"block_hash", p.block.hash().hex()},
              {"accepted", p.outcome.accepted},
              {"accepts", p.outcome.accepts},
              {"rejects", p.outcome.rejects},
              {"grace", p.grace},
              {"verdicts", verdicts_json(p.outcome, network)}};
    proposals.push_back(std::move(j));
  }
  json reveals = json::array();
  for (const auto& r : election.reveals()) {
    reveals.push_back({{"broadcast_ref", r.broadcast_ref},
                       {"ref", r.block.header.ref_number},
                       {"accepted", r.outcome.accepted},
                       {"accepts", r.outcome.accepts},
                       {"rejects", r.outcome.rejects},
                       {"verdicts", verdicts_json(r.outcome, network)}});
  }
  json decoded = json::array();
  json excluded = json::array();
  if (!result.tallies.empty()) {
    const Tally& agreed = result.tallies[network.reference().id()];
    for (const auto& d : agreed.decoded) {
      decoded.push_back({{"ballot_number", d.ballot_number}, {"ref", d.ref}, {"nominee", d.nominee_id}});
    }
    for (const auto& e : agreed.excluded) {
      excluded.push_back({{"ballot_number", e.ballot_number}, {"ref", e.ref}, {"reason", e.reason}});
    }
  }
  json nominees = json::array();
  for (const auto& c : election.plan().codes) {
    nominees.push_back({{"id", c.nominee_id}, {"label", c.label}, {"code", c.code}});
  }
  json peers = json::array();
  for (const auto& peer : network.peers()) peers.push_back(std::string(to_string(peer.policy())));

  json verify = {{"ok", result.chain_verdict.ok}};
  if (!result.chain_verdict.ok) {
    verify["at"] = result.chain_verdict.at;
    verify["reason"] = result.chain_verdict.reason;
  }

  json tally_doc = {{"nodes", tallies}, {"agreed", !diverged}};
  json report = {
      {"election",
       {{"start", config.start},
        {"end", config.end},
        {"grace", config.grace},
        {"groups", config.group_count},
        {"ballot_bits", config.ballot_bits},
        {"difficulty", config.difficulty},
        {"rng_seed", config.rng_seed},
        {"voters", election.registry().size()},
        {"nominees", nominees},
        {"peers", peers}}},
      {"actions", actions_log},
      {"proposals", proposals},
      {"reveals", reveals},
      {"tallies", tallies},
      {"decoded", decoded},
      {"excluded", excluded},
      {"grace_notified", election.grace_notified()},
      {"notifications", election.notifications().size()},
      {"chain",
       {{"blocks", chain.size()}, {"digest", sha256(result.artifacts.chain).hex()}, {"verify", verify}}},
      {"audit", {{"valid", audit.valid}, {"on_chain", audit.on_chain}, {"mismatches", audit.mismatches}}},
      {"diagnostics", result.diagnostics},
      {"exit_code", result.exit_code},
  };
  result.artifacts.tally = tally_doc.dump(2) + "\n";
  result.artifacts.report_json = report.dump(2) + "\n";
  result.artifacts.report_text = detail::render_report_text(report, std::nullopt);
  return result;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
}

}  // namespace

int run_to_directory(const std::filesystem::path& scenario_path, const std::filesystem::path& out_dir,
                     const RunOptions& options, std::ostream& log) {
  RunOutcome outcome;
  try {
    const Scenario scenario = load_scenario(scenario_path);
    outcome = run_scenario(scenario, options);
  } catch (const ParseError& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const DivergenceError& e) {
    log << "divergence: " << e.what() << '\n';
    return kExitFault;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  std::filesystem::create_directories(out_dir);
  write_file(out_dir / artifact::kChain, outcome.artifacts.chain);
  write_file(out_dir / artifact::kTally, outcome.artifacts.tally);
  write_file(out_dir / artifact::kReportJson, outcome.artifacts.report_json);
  write_file(out_dir / artifact::kReportText, outcome.artifacts.report_text);
  write_file(out_dir / artifact::kNotifications, outcome.artifacts.notifications);

  for (const auto& d : outcome.diagnostics) log << d << '\n';
  if (!outcome.tallies.empty()) {
    const Tally& t = outcome.tallies.front();
    log << "tally:";
    for (const auto& [id, count] : t.counts) log << ' ' << id << '=' << count;
    log << " excluded=" << t.excluded.size() << '\n';
  }
  log << "chain: " << (outcome.chain_verdict.ok ? "ok" : "broken") << '\n';
  return outcome.exit_code;
}

}  // namespace evote
