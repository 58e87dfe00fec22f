#include "evote/identity.hpp"

#include <algorithm>
#include <sstream>

#include "evote/error.hpp"

namespace evote {

namespace {

std::string cell_text(Cell c) {
  return "(" + std::to_string(c.row) + ", " + std::to_string(c.col) + ")";
}

}  // namespace

bool is_bit_string(std::string_view bits) {
  return std::all_of(bits.begin(), bits.end(), [](char c) { return c == '0' || c == '1'; });
}

std::string binarize_fingerprint(const CellSet& coordinates, Grid grid) {
  if (grid.rows <= 0 || grid.cols <= 0) {
    throw RangeError("grid dimensions must be positive");
  }
  std::string bits(grid.cells(), '0');
  for (const Cell& c : coordinates) {
    if (c.row < 0 || c.row >= grid.rows || c.col < 0 || c.col >= grid.cols) {
      throw RangeError("fingerprint cell " + cell_text(c) + " lies outside the " +
                       std::to_string(grid.rows) + "x" + std::to_string(grid.cols) + " grid");
    }
    bits[static_cast<std::size_t>(c.row) * static_cast<std::size_t>(grid.cols) +
         static_cast<std::size_t>(c.col)] = '1';
  }
  return bits;
}

CellSet cells_from_bits(std::string_view bits, Grid grid) {
  if (bits.size() != grid.cells() || !is_bit_string(bits)) {
    throw ValidationError("binary value does not match a " + std::to_string(grid.rows) + "x" +
                          std::to_string(grid.cols) + " grid");
  }
  CellSet cells;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] == '1') {
      cells.insert(Cell{static_cast<int>(i / static_cast<std::size_t>(grid.cols)),
                        static_cast<int>(i % static_cast<std::size_t>(grid.cols))});
    }
  }
  return cells;
}

Digest voter_digest(std::string_view binary_value) {
  if (binary_value.empty()) {
    throw ValidationError("binary value is empty");
  }
  if (!is_bit_string(binary_value)) {
    throw ValidationError("binary value contains characters other than '0' and '1'");
  }
  return sha256(binary_value);
}

VoterRecord register_voter(std::string nid, std::string name, CellSet coordinates, std::string contact,
                           Grid grid) {
  VoterRecord record;
  record.binary_value = binarize_fingerprint(coordinates, grid);
  record.nid = std::move(nid);
  record.name = std::move(name);
  record.coordinates = std::move(coordinates);
  record.contact = std::move(contact);
  return record;
}

Registry::Registry(std::vector<VoterRecord> voters, Grid grid) : voters_(std::move(voters)), grid_(grid) {
  digests_.reserve(voters_.size());
  for (std::size_t i = 0; i < voters_.size(); ++i) {
    VoterRecord& v = voters_[i];
    if (v.nid.empty()) {
      throw IntegrityError("voter at position " + std::to_string(i) + " has an empty NID");
    }
    const std::string expected = binarize_fingerprint(v.coordinates, grid_);
    if (v.binary_value.empty()) {
      v.binary_value = expected;
    } else if (v.binary_value != expected) {
      throw IntegrityError("voter " + v.nid + ": stored binary value disagrees with coordinates");
    }
    if (!by_nid_.emplace(v.nid, i).second) {
      throw IntegrityError("duplicate NID " + v.nid);
    }
    if (auto [it, inserted] = by_coordinates_.emplace(v.coordinates, i); !inserted) {
      throw IntegrityError("voters " + voters_[it->second].nid + " and " + v.nid +
                           " share an identical fingerprint coordinate set");
    }
    digests_.push_back(voter_digest(v.binary_value));
    by_digest_.emplace(digests_.back(), i);
  }
}

const VoterRecord* Registry::find_by_nid(std::string_view nid) const {
  auto it = by_nid_.find(nid);
  return it == by_nid_.end() ? nullptr : &voters_[it->second];
}

const VoterRecord* Registry::find_by_digest(const Digest& digest) const {
  auto it = by_digest_.find(digest);
  return it == by_digest_.end() ? nullptr : &voters_[it->second];
}

const VoterRecord* Registry::match_fingerprint(const CellSet& sample) const {
  auto it = by_coordinates_.find(sample);
  return it == by_coordinates_.end() ? nullptr : &voters_[it->second];
}

const Digest& Registry::digest_of(const VoterRecord& voter) const {
  auto it = by_nid_.find(voter.nid);
  if (it == by_nid_.end()) {
    throw ValidationError("voter " + voter.nid + " is not registered");
  }
  return digests_[it->second];
}

void Registry::assign_group(std::string_view nid, int group_id) {
  auto it = by_nid_.find(nid);
  if (it == by_nid_.end()) {
    throw ValidationError("voter " + std::string(nid) + " is not registered");
  }
  voters_[it->second].group_id = group_id;
}

void NotificationSink::notify(Timestamp at, std::string contact, std::string message) {
  records_.push_back(Notification{at, std::move(contact), std::move(message)});
}

std::string NotificationSink::render() const {
  std::ostringstream out;
  for (const auto& n : records_) {
    out << n.at << '\t' << n.contact << '\t' << n.message << '\n';
  }
  return out.str();
}

std::string_view to_string(PinOutcome outcome) {
  switch (outcome) {
    case PinOutcome::accepted: return "accepted";
    case PinOutcome::mismatch: return "mismatch";
    case PinOutcome::expired: return "expired";
    case PinOutcome::consumed: return "consumed";
    case PinOutcome::unknown_challenge: return "unknown-challenge";
  }
  return "unknown";
}

PinChallenge PinAuthority::issue(const Registry& registry, std::string_view nid, Timestamp now, Rng& rng,
                                 NotificationSink& sink) {
  const VoterRecord* voter = registry.find_by_nid(nid);
  if (voter == nullptr) {
    throw ValidationError("cannot issue a PIN to unregistered NID " + std::string(nid));
  }
  std::string pin = std::to_string(rng.below(1'000'000));
  pin.insert(0, 6 - pin.size(), '0');

  std::lock_guard lock(mutex_);
  PinChallenge challenge{next_id_++, voter->nid, pin, now, ttl_};
  issued_.emplace(challenge.id, Entry{voter->nid, pin, now, false});
  sink.notify(now, voter->contact, "Your voting PIN is " + pin);
  return challenge;
}

PinOutcome PinAuthority::verify(const PinChallenge& challenge, std::string_view submitted, Timestamp now) {
  std::lock_guard lock(mutex_);
  auto it = issued_.find(challenge.id);
  if (it == issued_.end() || it->second.nid != challenge.nid) {
    return PinOutcome::unknown_challenge;
  }
  Entry& entry = it->second;
  if (entry.used) return PinOutcome::consumed;
  if (now >= entry.issued_at + ttl_) return PinOutcome::expired;
  if (submitted != entry.pin) return PinOutcome::mismatch;
  entry.used = true;
  return PinOutcome::accepted;
}

}  // namespace evote
