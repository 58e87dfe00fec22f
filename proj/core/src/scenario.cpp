#include "evote/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "evote/error.hpp"

namespace evote {

using nlohmann::json;

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::vote: return "vote";
    case ActionKind::vote_with_pin: return "vote-with-pin";
    case ActionKind::request_pin: return "request-pin";
    case ActionKind::rogue_vote: return "rogue-vote";
    case ActionKind::tamper: return "tamper";
    case ActionKind::noop: return "noop";
  }
  return "unknown";
}

namespace {

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("scenario field '" + path + "': " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) field_error(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(path + "." + key, "missing");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) field_error(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
  if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
    field_error(path, "expected a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) field_error(path, "expected a string");
  return v.get<std::string>();
}

std::int64_t int_or(const json& obj, const std::string& key, std::int64_t fallback, const std::string& path) {
  auto it = obj.find(key);
  return it == obj.end() ? fallback : as_int(*it, path + "." + key);
}

CellSet parse_cells(const json& v, const std::string& path) {
  if (!v.is_array()) field_error(path, "expected an array of [row, col] pairs");
  CellSet cells;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = path + "[" + std::to_string(i) + "]";
    const json& pair = v[i];
    if (!pair.is_array() || pair.size() != 2) field_error(p, "expected [row, col]");
    cells.insert(Cell{static_cast<int>(as_int(pair[0], p + "[0]")), static_cast<int>(as_int(pair[1], p + "[1]"))});
  }
  return cells;
}

json dump_cells(const CellSet& cells) {
  json out = json::array();
  for (const Cell& c : cells) out.push_back({c.row, c.col});
  return out;
}

ActionKind parse_kind(const std::string& name, const std::string& path) {
  if (name == "vote") return ActionKind::vote;
  if (name == "vote-with-pin") return ActionKind::vote_with_pin;
  if (name == "request-pin") return ActionKind::request_pin;
  if (name == "rogue-vote") return ActionKind::rogue_vote;
  if (name == "tamper") return ActionKind::tamper;
  if (name == "noop") return ActionKind::noop;
  field_error(path, "unknown action '" + name + "'");
}

SiblingFault parse_fault(const std::string& name, const std::string& path) {
  if (name == "none") return SiblingFault::none;
  if (name == "withhold-sibling") return SiblingFault::withhold;
  if (name == "corrupt-opening") return SiblingFault::corrupt_opening;
  field_error(path, "unknown fault '" + name + "'");
}

std::string_view fault_name(SiblingFault fault) {
  switch (fault) {
    case SiblingFault::none: return "none";
    case SiblingFault::withhold: return "withhold-sibling";
    case SiblingFault::corrupt_opening: return "corrupt-opening";
  }
  return "none";
}

ElectionConfig parse_config(const json& c) {
  const std::string path = "config";
  if (!c.is_object()) field_error(path, "expected an object");
  ElectionConfig config;
  config.start = as_int(require(c, "start", path), path + ".start");
  config.end = as_int(require(c, "end", path), path + ".end");
  config.grace = int_or(c, "grace", 0, path);
  config.group_count = static_cast<std::size_t>(int_or(c, "groups", 1, path));
  config.ballot_bits = static_cast<std::size_t>(int_or(c, "ballot_bits", 32, path));
  config.difficulty = static_cast<unsigned>(int_or(c, "difficulty", 8, path));
  config.pin_ttl = int_or(c, "pin_ttl", PinAuthority::kDefaultTtl, path);
  if (auto it = c.find("rng_seed"); it != c.end()) config.rng_seed = as_uint(*it, path + ".rng_seed");
  if (auto it = c.find("grid"); it != c.end()) {
    const json& g = *it;
    if (!g.is_object()) field_error(path + ".grid", "expected {\"rows\": R, \"cols\": C}");
    config.grid.rows = static_cast<int>(as_int(require(g, "rows", path + ".grid"), path + ".grid.rows"));
    config.grid.cols = static_cast<int>(as_int(require(g, "cols", path + ".grid"), path + ".grid.cols"));
  }
  const json& nominees = require(c, "nominees", path);
  if (!nominees.is_array()) field_error(path + ".nominees", "expected an array");
  for (std::size_t i = 0; i < nominees.size(); ++i) {
    const std::string p = path + ".nominees[" + std::to_string(i) + "]";
    const json& n = nominees[i];
    Nominee nominee;
    nominee.id = as_string(require(n, "id", p), p + ".id");
    if (auto it = n.find("label"); it != n.end()) nominee.label = as_string(*it, p + ".label");
    config.nominees.push_back(std::move(nominee));
  }
  try {
    config.validate();
  } catch (const ParameterError& e) {
    field_error(path, e.what());
  }
  return config;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what(), e.byte == 0 ? 0 : e.byte - 1);
  }
  if (!doc.is_object()) field_error("$", "expected an object");

  Scenario scenario;
  scenario.config = parse_config(require(doc, "config", "$"));

  const json& voters = require(doc, "voters", "$");
  if (!voters.is_array()) field_error("voters", "expected an array");
  for (std::size_t i = 0; i < voters.size(); ++i) {
    const std::string p = "voters[" + std::to_string(i) + "]";
    const json& v = voters[i];
    VoterRecord record;
    record.nid = as_string(require(v, "nid", p), p + ".nid");
    if (auto it = v.find("name"); it != v.end()) record.name = as_string(*it, p + ".name");
    record.coordinates = parse_cells(require(v, "coordinates", p), p + ".coordinates");
    if (auto it = v.find("contact"); it != v.end()) record.contact = as_string(*it, p + ".contact");
    if (auto it = v.find("binary_value"); it != v.end()) record.binary_value = as_string(*it, p + ".binary_value");
    scenario.voters.push_back(std::move(record));
  }
  std::set<std::string, std::less<>> nids;
  for (const auto& v : scenario.voters) nids.insert(v.nid);

  if (auto it = doc.find("peers"); it == doc.end()) {
    scenario.peers.assign(1, PeerPolicy::honest);
  } else if (it->is_number_integer()) {
    const auto count = as_int(*it, "peers");
    if (count < 1) field_error("peers", "at least one peer is required");
    scenario.peers.assign(static_cast<std::size_t>(count), PeerPolicy::honest);
  } else if (it->is_array()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "peers[" + std::to_string(i) + "]";
      try {
        scenario.peers.push_back(parse_peer_policy(as_string((*it)[i], p)));
      } catch (const ValidationError& e) {
        field_error(p, e.what());
      }
    }
    if (scenario.peers.empty()) field_error("peers", "at least one peer is required");
  } else {
    field_error("peers", "expected a count or a list of policies");
  }

  std::optional<Timestamp> last_at;
  if (auto it = doc.find("actions"); it != doc.end()) {
    if (!it->is_array()) field_error("actions", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string p = "actions[" + std::to_string(i) + "]";
      const json& a = (*it)[i];
      ScenarioAction action;
      action.kind = parse_kind(as_string(require(a, "action", p), p + ".action"), p + ".action");
      const bool has_at = a.contains("at");
      const bool has_offset = a.contains("window_offset");
      if (has_at == has_offset) field_error(p, "exactly one of 'at' and 'window_offset' is required");
      if (has_at) {
        action.at = as_int(a["at"], p + ".at");
        if (last_at && *action.at < *last_at) field_error(p + ".at", "actions must be sorted by timestamp");
        last_at = action.at;
      } else {
        action.window_offset = as_int(a["window_offset"], p + ".window_offset");
      }
      if (auto f = a.find("actor"); f != a.end()) action.actor = as_string(*f, p + ".actor");
      if (auto f = a.find("nominee"); f != a.end()) action.nominee = as_string(*f, p + ".nominee");
      if (auto f = a.find("fingerprint"); f != a.end()) action.fingerprint = parse_cells(*f, p + ".fingerprint");
      if (auto f = a.find("pin"); f != a.end()) action.pin = as_string(*f, p + ".pin");
      if (auto f = a.find("fault"); f != a.end()) action.fault = parse_fault(as_string(*f, p + ".fault"), p + ".fault");

      switch (action.kind) {
        case ActionKind::vote:
        case ActionKind::vote_with_pin:
        case ActionKind::request_pin:
          if (!nids.contains(action.actor)) field_error(p + ".actor", "'" + action.actor + "' is not a registered NID");
          if (action.kind != ActionKind::request_pin && action.nominee.empty()) field_error(p + ".nominee", "missing");
          break;
        case ActionKind::rogue_vote:
          if (!nids.contains(action.actor) && !action.fingerprint) {
            field_error(p, "an unregistered rogue voter needs a fingerprint");
          }
          if (action.nominee.empty()) field_error(p + ".nominee", "missing");
          break;
        case ActionKind::tamper:
          action.block_ref = as_uint(require(a, "block_ref", p), p + ".block_ref");
          action.bit = static_cast<std::size_t>(as_uint(require(a, "bit", p), p + ".bit"));
          if (action.actor.empty()) action.actor = "external";
          break;
        case ActionKind::noop:
          break;
      }
      if (has_offset && !nids.contains(action.actor)) {
        field_error(p + ".window_offset", "requires a registered actor");
      }
      scenario.actions.push_back(std::move(action));
    }
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::string dump_scenario(const Scenario& scenario) {
  const ElectionConfig& c = scenario.config;
  json config = {
      {"start", c.start},
      {"end", c.end},
      {"grace", c.grace},
      {"groups", c.group_count},
      {"ballot_bits", c.ballot_bits},
      {"difficulty", c.difficulty},
      {"rng_seed", c.rng_seed},
      {"pin_ttl", c.pin_ttl},
      {"grid", {{"rows", c.grid.rows}, {"cols", c.grid.cols}}},
  };
  config["nominees"] = json::array();
  for (const auto& n : c.nominees) config["nominees"].push_back({{"id", n.id}, {"label", n.label}});

  json voters = json::array();
  for (const auto& v : scenario.voters) {
    voters.push_back({{"nid", v.nid}, {"name", v.name}, {"coordinates", dump_cells(v.coordinates)}, {"contact", v.contact}});
  }
  json peers = json::array();
  for (auto p : scenario.peers) peers.push_back(std::string(to_string(p)));

  json actions = json::array();
  for (const auto& a : scenario.actions) {
    json j;
    if (a.at) j["at"] = *a.at;
    if (a.window_offset) j["window_offset"] = *a.window_offset;
    j["action"] = std::string(to_string(a.kind));
    if (!a.actor.empty()) j["actor"] = a.actor;
    if (!a.nominee.empty()) j["nominee"] = a.nominee;
    if (a.fingerprint) j["fingerprint"] = dump_cells(*a.fingerprint);
    if (a.pin) j["pin"] = *a.pin;
    if (a.kind == ActionKind::tamper) {
      j["block_ref"] = a.block_ref;
      j["bit"] = a.bit;
    }
    if (a.fault != SiblingFault::none) j["fault"] = std::string(fault_name(a.fault));
    actions.push_back(std::move(j));
  }
  json doc = {{"config", config}, {"voters", voters}, {"peers", peers}, {"actions", actions}};
  return doc.dump(2) + "\n";
}

}  // namespace evote
