#include "evote/audit.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "evote/error.hpp"
#include "evote/runner.hpp"
#include "report_render.hpp"

namespace evote {

using nlohmann::json;

int VerifyReport::exit_code() const {
  if (parse_error) return kExitInputError;
  return ok() ? kExitOk : kExitFault;
}

std::string VerifyReport::render() const {
  std::ostringstream out;
  if (parse_error) {
    out << "parse error: " << *parse_error << '\n';
    return out.str();
  }
  if (verdict.ok) {
    out << "chain: ok (" << blocks << " blocks)\n";
  } else {
    out << "chain: broken at block " << verdict.at << ": " << verdict.reason << '\n';
  }
  if (audit) {
    out << "ballot audit: " << audit->valid.size() << " valid, " << audit->on_chain.size() << " on chain";
    if (audit->matches()) {
      out << ", consistent\n";
    } else {
      out << ", " << audit->mismatches.size() << " mismatches\n";
      for (const auto& m : audit->mismatches) out << "  " << m << '\n';
    }
  }
  return out.str();
}

VerifyReport verify_chain_text(std::string_view text, unsigned difficulty) {
  VerifyReport report;
  ChainState chain;
  try {
    chain = ChainState::from_text(text);
  } catch (const ParseError& e) {
    report.parse_error = e.what();
    return report;
  }
  report.blocks = chain.size();
  report.verdict = verify_chain(chain, difficulty);
  if (!report.verdict.ok) return report;

  std::vector<Block> ballots;
  for (const Block& block : chain.blocks()) {
    if (block.kind() == PayloadKind::ballot) ballots.push_back(block);
  }
  try {
    report.audit = audit_ballots(ballots, chain, chain.tip_timestamp());
  } catch (const Error& e) {
    BallotAudit failed;
    failed.mismatches.push_back(e.what());
    report.audit = std::move(failed);
  }
  return report;
}

VerifyReport verify_chain_file(const std::filesystem::path& path, unsigned difficulty) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    VerifyReport report;
    report.parse_error = "cannot open " + path.string();
    return report;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return verify_chain_text(buffer.str(), difficulty);
}

namespace detail {

namespace {

void render_verdicts(std::ostream& out, const json& verdicts, const std::string& indent) {
  for (const auto& v : verdicts) {
    out << indent << "peer " << v["peer"].get<std::size_t>() << " (" << v["policy"].get<std::string>()
        << "): " << (v["accept"].get<bool>() ? "accept" : "reject");
    const auto& reasons = v["reasons"];
    if (!reasons.empty()) {
      out << " [";
      for (std::size_t i = 0; i < reasons.size(); ++i) {
        if (i) out << ", ";
        out << reasons[i].get<std::string>();
      }
      out << ']';
    }
    out << '\n';
  }
}

const json* find_by_ballot(const json& list, std::uint64_t number) {
  for (const auto& item : list) {
    if (item.contains("ballot_number") && item["ballot_number"].get<std::uint64_t>() == number) return &item;
  }
  return nullptr;
}

}  // namespace

std::string render_report_text(const json& report, std::optional<std::uint64_t> ballot_number) {
  std::ostringstream out;
  if (ballot_number) {
    const json* proposal = find_by_ballot(report["proposals"], *ballot_number);
    if (proposal == nullptr) {
      out << "ballot " << *ballot_number << ": not found\n";
      return out.str();
    }
    const json& p = *proposal;
    out << "ballot " << *ballot_number << '\n';
    out << "  proposed at: " << p["at"].get<std::int64_t>() << (p["grace"].get<bool>() ? " (grace)" : "") << '\n';
    out << "  block: " << (p["accepted"].get<bool>() ? "ref " : "proposed at ref ") << p["ref"].get<std::uint64_t>() << ", hash " << p["block_hash"].get<std::string>() << '\n';
    out << "  status: " << (p["accepted"].get<bool>() ? "accepted" : "rejected") << " ("
        << p["accepts"].get<std::size_t>() << "-" << p["rejects"].get<std::size_t>() << ")\n";
    out << "  verdicts:\n";
    render_verdicts(out, p["verdicts"], "    ");
    if (p["accepted"].get<bool>()) {
      if (const json* d = find_by_ballot(report["decoded"], *ballot_number)) {
        out << "  decoded choice: " << (*d)["nominee"].get<std::string>() << '\n';
      } else if (const json* e = find_by_ballot(report["excluded"], *ballot_number)) {
        out << "  excluded from tally: " << (*e)["reason"].get<std::string>() << '\n';
      } else {
        out << "  decoded choice: not revealed\n";
      }
    }
    return out.str();
  }

  const json& e = report["election"];
  out << "Election audit report\n";
  out << "  window: [" << e["start"].get<std::int64_t>() << ", " << e["end"].get<std::int64_t>() << ") grace "
      << e["grace"].get<std::int64_t>() << '\n';
  out << "  voters: " << e["voters"].get<std::size_t>() << ", groups: " << e["groups"].get<std::size_t>()
      << ", peers: " << e["peers"].size() << ", ballot bits: " << e["ballot_bits"].get<std::size_t>()
      << ", difficulty: " << e["difficulty"].get<unsigned>() << '\n';
  out << "  nominees:";
  for (const auto& n : e["nominees"]) {
    out << ' ' << n["id"].get<std::string>() << '=' << n["code"].get<std::string>();
  }
  out << "\n\nActions\n";
  for (const auto& a : report["actions"]) {
    out << "  t=" << a["at"].get<std::int64_t>() << ' ' << a["action"].get<std::string>();
    if (const auto actor = a["actor"].get<std::string>(); !actor.empty()) out << ' ' << actor;
    out << ": " << a["outcome"].get<std::string>();
    if (a.contains("stage") && a["outcome"] == "rejected") out << " at " << a["stage"].get<std::string>();
    if (a.contains("reason")) out << " (" << a["reason"].get<std::string>() << ')';
    if (a.contains("ballot_number")) out << " ballot " << a["ballot_number"].get<std::uint64_t>();
    out << '\n';
  }
  out << "\nProposals\n";
  for (const auto& p : report["proposals"]) {
    out << "  ballot " << p["ballot_number"].get<std::uint64_t>() << " at t=" << p["at"].get<std::int64_t>() << ": "
        << (p["accepted"].get<bool>() ? "accepted as block " + std::to_string(p["ref"].get<std::uint64_t>())
                                      : std::string("discarded"))
        << " (" << p["accepts"].get<std::size_t>() << "-" << p["rejects"].get<std::size_t>() << ")\n";
    render_verdicts(out, p["verdicts"], "    ");
  }
  out << "\nReveal\n";
  for (const auto& r : report["reveals"]) {
    out << "  sibling of block " << r["broadcast_ref"].get<std::uint64_t>() << " -> block "
        << r["ref"].get<std::uint64_t>() << ": " << (r["accepted"].get<bool>() ? "accepted" : "discarded") << '\n';
  }
  out << "\nTallies\n";
  for (const auto& t : report["tallies"]) {
    out << "  node " << t["node"].get<std::size_t>() << (t["honest"].get<bool>() ? "" : " (byzantine)") << ':';
    for (const auto& c : t["counts"]) {
      out << ' ' << c["nominee"].get<std::string>() << '=' << c["count"].get<std::uint64_t>();
    }
    out << " excluded=" << t["excluded"].size() << '\n';
  }
  if (!report["excluded"].empty()) {
    out << "\nExcluded ballots\n";
    for (const auto& x : report["excluded"]) {
      out << "  ballot " << x["ballot_number"].get<std::uint64_t>() << " (block " << x["ref"].get<std::uint64_t>()
          << "): " << x["reason"].get<std::string>() << '\n';
    }
  }
  const json& c = report["chain"];
  out << "\nChain\n  blocks: " << c["blocks"].get<std::size_t>() << "\n  digest: " << c["digest"].get<std::string>()
      << "\n  verify: ";
  if (c["verify"]["ok"].get<bool>()) {
    out << "ok\n";
  } else {
    out << "broken at block " << c["verify"]["at"].get<std::uint64_t>() << ": "
        << c["verify"]["reason"].get<std::string>() << '\n';
  }
  const json& audit = report["audit"];
  out << "  ballot audit: " << audit["valid"].size() << " valid, " << audit["on_chain"].size() << " on chain";
  out << (audit["mismatches"].empty() ? ", consistent\n" : ", mismatched\n");
  for (const auto& m : audit["mismatches"]) out << "    " << m.get<std::string>() << '\n';
  out << "\nNotifications sent: " << report["notifications"].get<std::size_t>() << '\n';
  for (const auto& d : report["diagnostics"]) out << "diagnostic: " << d.get<std::string>() << '\n';
  return out.str();
}

}  // namespace detail

std::string render_report(const std::filesystem::path& dir, std::optional<std::uint64_t> ballot_number) {
  std::vector<std::string> missing;
  for (const char* name : {artifact::kChain, artifact::kTally, artifact::kReportJson, artifact::kNotifications}) {
    if (!std::filesystem::exists(dir / name)) missing.emplace_back(name);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw Error("missing artifacts in " + dir.string() + ": " + list);
  }
  std::ifstream in(dir / artifact::kReportJson, std::ios::binary);
  json report;
  try {
    report = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("report.json is unreadable: ") + e.what());
  }
  return detail::render_report_text(report, ballot_number);
}

}  // namespace evote
