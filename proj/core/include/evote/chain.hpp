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
#include "evote/hash.hpp"
#include "evote/identity.hpp"
#include "evote/types.hpp"

namespace evote {

inline constexpr unsigned kMaxDifficulty = 24;

struct BlockHeader {
  static constexpr std::size_t kEncodedSize = 8 + 32 + 32 + 8 + 8;

  std::uint64_t ref_number = 0;
  Digest prev_hash;
  Digest payload_hash;
  Timestamp timestamp = 0;
  std::uint64_t nonce = 0;

  Bytes serialize() const;
  static BlockHeader parse(std::span<const std::uint8_t> bytes, std::size_t base_offset = 0);
  Digest hash() const;

  bool operator==(const BlockHeader&) const = default;
};

// Block 0: the organizer's inputs.
struct GenesisRecord {
  Timestamp start = 0;
  Timestamp end = 0;
  Duration grace = 0;
  std::uint32_t ballot_bits = 0;
  std::uint32_t difficulty = 0;
  Grid grid;
  std::vector<VoterRecord> voters;
  CodePlan plan;
};

struct GroupWindow {
  int group_id = 0;
  Timestamp st = 0;
  Timestamp et = 0;  // exclusive
  std::vector<Digest> members;
};

// Block 1: the random group windows, keyed by voter digest.
struct ScheduleRecord {
  std::vector<GroupWindow> groups;
};

// The held-back reveal record paired with one ballot block.
struct SiblingRecord {
  Digest voter_digest;
  std::uint64_t broadcast_ref = 0;
  std::uint64_t own_ref = 0;
  OpeningValue opening;
  bool operator==(const SiblingRecord&) const = default;
};

using Payload = std::variant<GenesisRecord, ScheduleRecord, Ballot, SiblingRecord>;

enum class PayloadKind : std::uint8_t { genesis = 1, schedule = 2, ballot = 3, sibling = 4 };

Bytes encode_payload(const Payload& payload);
/// Throws ParseError (offsets relative to base_offset).
Payload decode_payload(std::span<const std::uint8_t> bytes, std::size_t base_offset = 0);
std::optional<PayloadKind> peek_kind(std::span<const std::uint8_t> bytes);

// A header plus its payload kept in canonical encoded form, so any stored
// bit can be mutated and the payload hash always covers exactly what is stored.
struct Block {
  BlockHeader header;
  Bytes payload;

  Digest hash() const { return header.hash(); }
  Payload decode() const { return decode_payload(payload); }
  std::optional<PayloadKind> kind() const { return peek_kind(payload); }

  /// Hex of header || payload.
  std::string to_line() const;
  /// Throws ParseError with offsets relative to the start of the file.
  static Block from_line(std::string_view hex_line, std::size_t file_offset = 0);

  bool operator==(const Block&) const = default;
};

bool meets_difficulty(const Digest& hash, unsigned difficulty);

/// Smallest nonce from 0 upward whose header hash meets the difficulty.
/// Throws RangeError for difficulty > kMaxDifficulty.
BlockHeader mine(std::span<const std::uint8_t> payload, const Digest& prev_hash,
                 std::uint64_t ref_number, Timestamp timestamp, unsigned difficulty);

Block mine_block(const Payload& payload, const Digest& prev_hash, std::uint64_t ref_number,
                 Timestamp timestamp, unsigned difficulty);

// Hash-linked block sequence starting at genesis. Single writer.
class ChainState {
 public:
  /// Throws LinkError on a stale prev_hash, a non-consecutive ref_number,
  /// or an undecodable payload.
  void append(Block block);

  /// Accepts blocks without link checks; used to reload possibly broken
  /// files for verification.
  static ChainState from_blocks_unchecked(std::vector<Block> blocks);

  std::size_t size() const { return blocks_.size(); }
  bool empty() const { return blocks_.empty(); }
  std::span<const Block> blocks() const { return blocks_; }
  const Block& at(std::uint64_t ref) const;
  Digest tip_hash() const;
  std::uint64_t next_ref() const { return blocks_.size(); }
  Timestamp tip_timestamp() const;

  const GenesisRecord* genesis() const { return genesis_ ? &*genesis_ : nullptr; }
  const ScheduleRecord* schedule() const { return schedule_ ? &*schedule_ : nullptr; }

  bool has_ballot_from(const Digest& digest) const { return ballot_by_digest_.contains(digest); }
  bool has_ballot_number(std::uint64_t number) const { return ballot_numbers_.contains(number); }
  std::optional<std::uint64_t> ballot_ref_for(const Digest& digest) const;
  bool has_sibling_for(std::uint64_t broadcast_ref) const {
    return sibling_by_broadcast_.contains(broadcast_ref);
  }
  std::size_t ballot_count() const { return ballot_numbers_.size(); }

  /// Flips one stored bit of block `ref` (header bits first, then payload
  /// bits). Indexes are left untouched: this models tampering with storage.
  void tamper_bit(std::uint64_t ref, std::size_t bit);

  /// One hex line per block, in order.
  std::string to_text() const;
  /// Throws ParseError naming the byte offset of the failure.
  static ChainState from_text(std::string_view text);

  bool operator==(const ChainState& other) const { return blocks_ == other.blocks_; }

 private:
  void index(const Block& block, const Payload& payload);

  std::vector<Block> blocks_;
  std::optional<GenesisRecord> genesis_;
  std::optional<ScheduleRecord> schedule_;
  std::unordered_map<Digest, std::uint64_t> ballot_by_digest_;
  std::unordered_set<std::uint64_t> ballot_numbers_;
  std::unordered_map<std::uint64_t, std::uint64_t> sibling_by_broadcast_;
};

struct ChainVerdict {
  bool ok = true;
  std::uint64_t at = 0;
  std::string reason;

  static ChainVerdict good() { return {}; }
  static ChainVerdict broken(std::uint64_t at, std::string reason) {
    return {false, at, std::move(reason)};
  }
};

/// Walks from genesis and reports the first failure: ref-number,
/// prev-hash, payload-hash, proof-of-work, nonce-not-minimal, timestamp.
ChainVerdict verify_chain(const ChainState& chain, unsigned difficulty);

// Private store of sibling records during voting. Nothing in it is visible
// to peers until release.
class SiblingVault {
 public:
  /// Throws PhaseError after release opened, IntegrityError on a duplicate broadcast_ref.
  void hold(SiblingRecord sibling);
  /// Destroys the sibling of a discarded ballot block. Returns whether one existed.
  bool discard(std::uint64_t broadcast_ref);
  /// Removes and returns a sibling without releasing it (faulty client).
  std::optional<SiblingRecord> withdraw(std::uint64_t broadcast_ref);

  void open_reveal() { reveal_open_ = true; }
  bool reveal_open() const { return reveal_open_; }

  /// Hands back every held sibling ordered by broadcast_ref and empties the
  /// vault. Throws PhaseError before open_reveal().
  std::vector<SiblingRecord> release();

  bool contains(std::uint64_t broadcast_ref) const;
  std::size_t size() const { return held_.size(); }
  std::vector<std::uint64_t> refs() const;
  std::span<const SiblingRecord> held() const { return held_; }

 private:
  std::vector<SiblingRecord> held_;
  bool reveal_open_ = false;
};

}  // namespace evote
