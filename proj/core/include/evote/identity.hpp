#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evote/hash.hpp"
#include "evote/rng.hpp"
#include "evote/types.hpp"

namespace evote {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

using CellSet = std::set<Cell>;

// Fingerprint capture grid. A cell is 1 when at least one point falls in it.
struct Grid {
  int rows = 16;
  int cols = 16;
  std::size_t cells() const { return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols); }
  bool operator==(const Grid&) const = default;
};

bool is_bit_string(std::string_view bits);

/// Row-major bitmap of `coordinates`: bit r*cols + c is '1' iff (r, c) is
/// present. Throws RangeError naming the first cell outside the grid.
std::string binarize_fingerprint(const CellSet& coordinates, Grid grid);

/// Inverse of binarize_fingerprint.
CellSet cells_from_bits(std::string_view bits, Grid grid);

/// SHA-256 over the ASCII '0'/'1' text of the binary value. This is the
/// only voter identity that ever appears in ballots.
Digest voter_digest(std::string_view binary_value);

struct VoterRecord {
  std::string nid;
  std::string name;
  CellSet coordinates;
  std::string binary_value;
  std::string contact;
  std::optional<int> group_id;
};

/// Builds a record with its binary value precomputed.
VoterRecord register_voter(std::string nid, std::string name, CellSet coordinates,
                           std::string contact, Grid grid);

// Eligible voter list. Loading rejects duplicate NIDs, duplicate
// coordinate sets and binary values that disagree with the coordinates.
class Registry {
 public:
  Registry() = default;
  Registry(std::vector<VoterRecord> voters, Grid grid);

  const VoterRecord* find_by_nid(std::string_view nid) const;
  const VoterRecord* find_by_digest(const Digest& digest) const;
  /// Exact coordinate-set equality.
  const VoterRecord* match_fingerprint(const CellSet& sample) const;

  const Digest& digest_of(const VoterRecord& voter) const;

  std::span<const VoterRecord> voters() const { return voters_; }
  std::size_t size() const { return voters_.size(); }
  bool empty() const { return voters_.empty(); }
  Grid grid() const { return grid_; }

  void assign_group(std::string_view nid, int group_id);

 private:
  std::vector<VoterRecord> voters_;
  std::vector<Digest> digests_;
  Grid grid_;
  std::map<std::string, std::size_t, std::less<>> by_nid_;
  std::map<CellSet, std::size_t> by_coordinates_;
  std::unordered_map<Digest, std::size_t> by_digest_;
};

struct Notification {
  Timestamp at = 0;
  std::string contact;
  std::string message;
};

// Append-only record of every message the election would have sent.
class NotificationSink {
 public:
  void notify(Timestamp at, std::string contact, std::string message);
  std::span<const Notification> records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  /// One line per record: "<at>\t<contact>\t<message>".
  std::string render() const;

 private:
  std::vector<Notification> records_;
};

struct PinChallenge {
  std::uint64_t id = 0;
  std::string nid;
  std::string pin;
  Timestamp issued_at = 0;
  Duration ttl = 0;
};

enum class PinOutcome { accepted, mismatch, expired, consumed, unknown_challenge };

std::string_view to_string(PinOutcome outcome);

// Issues single-use PIN challenges for the fingerprint fallback path.
class PinAuthority {
 public:
  static constexpr Duration kDefaultTtl = 300;

  explicit PinAuthority(Duration ttl = kDefaultTtl) : ttl_(ttl) {}

  /// Draws a 6-digit PIN and notifies the voter's contact.
  /// Throws ValidationError for an unregistered nid.
  PinChallenge issue(const Registry& registry, std::string_view nid, Timestamp now, Rng& rng,
                     NotificationSink& sink);

  /// Accepts iff the challenge is known and unused, now < issued_at + ttl,
  /// and the PIN matches. Acceptance consumes the challenge.
  PinOutcome verify(const PinChallenge& challenge, std::string_view submitted, Timestamp now);

  Duration ttl() const { return ttl_; }

 private:
  struct Entry {
    std::string nid;
    std::string pin;
    Timestamp issued_at = 0;
    bool used = false;
  };

  Duration ttl_;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, Entry> issued_;
  std::mutex mutex_;
};

}  // namespace evote
