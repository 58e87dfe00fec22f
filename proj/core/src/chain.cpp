#include "evote/chain.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "evote/codec.hpp"
#include "evote/error.hpp"

namespace evote {

Bytes BlockHeader::serialize() const {
  ByteWriter w;
  w.u64(ref_number);
  w.digest(prev_hash);
  w.digest(payload_hash);
  w.i64(timestamp);
  w.u64(nonce);
  return std::move(w).take();
}

BlockHeader BlockHeader::parse(std::span<const std::uint8_t> bytes, std::size_t base_offset) {
  ByteReader r(bytes, base_offset);
  BlockHeader h;
  h.ref_number = r.u64();
  h.prev_hash = r.digest();
  h.payload_hash = r.digest();
  h.timestamp = r.i64();
  h.nonce = r.u64();
  r.expect_end("block header");
  return h;
}

Digest BlockHeader::hash() const { return sha256(serialize()); }

namespace {

template <class T>
std::uint32_t count32(const T& container) {
  return static_cast<std::uint32_t>(container.size());
}

void encode(ByteWriter& w, const GenesisRecord& g) {
  w.u8(static_cast<std::uint8_t>(PayloadKind::genesis));
  w.i64(g.start);
  w.i64(g.end);
  w.i64(g.grace);
  w.u32(g.ballot_bits);
  w.u32(g.difficulty);
  w.u32(static_cast<std::uint32_t>(g.grid.rows));
  w.u32(static_cast<std::uint32_t>(g.grid.cols));
  w.u32(count32(g.voters));
  for (const auto& v : g.voters) {
    w.str(v.nid);
    w.str(v.name);
    w.str(v.binary_value);
    w.u32(count32(v.coordinates));
    for (const Cell& c : v.coordinates) {
      w.u32(static_cast<std::uint32_t>(c.row));
      w.u32(static_cast<std::uint32_t>(c.col));
    }
    w.str(v.contact);
  }
  w.u32(static_cast<std::uint32_t>(g.plan.code_bits));
  w.u32(static_cast<std::uint32_t>(g.plan.weight));
  w.u32(count32(g.plan.codes));
  for (const auto& c : g.plan.codes) {
    w.str(c.nominee_id);
    w.str(c.label);
    w.str(c.code);
  }
}

void encode(ByteWriter& w, const ScheduleRecord& s) {
  w.u8(static_cast<std::uint8_t>(PayloadKind::schedule));
  w.u32(count32(s.groups));
  for (const auto& g : s.groups) {
    w.u32(static_cast<std::uint32_t>(g.group_id));
    w.i64(g.st);
    w.i64(g.et);
    w.u32(count32(g.members));
    for (const auto& m : g.members) w.digest(m);
  }
}

void encode(ByteWriter& w, const Ballot& b) {
  w.u8(static_cast<std::uint8_t>(PayloadKind::ballot));
  w.u64(b.ballot_number);
  w.digest(b.voter_digest);
  w.str(b.ballot_string);
}

void encode(ByteWriter& w, const SiblingRecord& s) {
  w.u8(static_cast<std::uint8_t>(PayloadKind::sibling));
  w.digest(s.voter_digest);
  w.u64(s.broadcast_ref);
  w.u64(s.own_ref);
  w.u32(count32(s.opening.indexes));
  for (auto i : s.opening.indexes) w.u32(static_cast<std::uint32_t>(i));
}

// Element counts are bounded by the bytes left so a corrupt count cannot
// trigger a huge allocation.
std::uint32_t read_count(ByteReader& r, std::size_t remaining, std::size_t min_element) {
  const std::uint32_t n = r.u32();
  if (min_element > 0 && n > remaining / min_element) {
    r.fail("element count " + std::to_string(n) + " exceeds remaining data");
  }
  return n;
}

GenesisRecord decode_genesis(ByteReader& r, std::size_t size) {
  GenesisRecord g;
  g.start = r.i64();
  g.end = r.i64();
  g.grace = r.i64();
  g.ballot_bits = r.u32();
  g.difficulty = r.u32();
  const auto rows = r.u32();
  const auto cols = r.u32();
  if (rows == 0 || cols == 0 || rows > 4096 || cols > 4096) r.fail("implausible grid dimensions");
  g.grid = Grid{static_cast<int>(rows), static_cast<int>(cols)};
  const auto voters = read_count(r, size - r.position(), 16);
  g.voters.reserve(voters);
  for (std::uint32_t i = 0; i < voters; ++i) {
    VoterRecord v;
    v.nid = r.str();
    v.name = r.str();
    v.binary_value = r.str();
    const auto cells = read_count(r, size - r.position(), 8);
    for (std::uint32_t k = 0; k < cells; ++k) {
      const auto row = r.u32();
      const auto col = r.u32();
      v.coordinates.insert(Cell{static_cast<int>(row), static_cast<int>(col)});
    }
    v.contact = r.str();
    g.voters.push_back(std::move(v));
  }
  g.plan.code_bits = r.u32();
  g.plan.weight = r.u32();
  const auto codes = read_count(r, size - r.position(), 12);
  for (std::uint32_t i = 0; i < codes; ++i) {
    NomineeCode c;
    c.nominee_id = r.str();
    c.label = r.str();
    c.code = r.str();
    g.plan.codes.push_back(std::move(c));
  }
  return g;
}

ScheduleRecord decode_schedule(ByteReader& r, std::size_t size) {
  ScheduleRecord s;
  const auto groups = read_count(r, size - r.position(), 24);
  for (std::uint32_t i = 0; i < groups; ++i) {
    GroupWindow g;
    g.group_id = static_cast<int>(r.u32());
    g.st = r.i64();
    g.et = r.i64();
    const auto members = read_count(r, size - r.position(), Digest::kSize);
    g.members.reserve(members);
    for (std::uint32_t k = 0; k < members; ++k) g.members.push_back(r.digest());
    s.groups.push_back(std::move(g));
  }
  return s;
}

}  // namespace

Bytes encode_payload(const Payload& payload) {
  ByteWriter w;
  std::visit([&w](const auto& p) { encode(w, p); }, payload);
  return std::move(w).take();
}

Payload decode_payload(std::span<const std::uint8_t> bytes, std::size_t base_offset) {
  ByteReader r(bytes, base_offset);
  const auto tag = r.u8();
  Payload out;
  switch (static_cast<PayloadKind>(tag)) {
    case PayloadKind::genesis:
      out = decode_genesis(r, bytes.size());
      break;
    case PayloadKind::schedule:
      out = decode_schedule(r, bytes.size());
      break;
    case PayloadKind::ballot: {
      Ballot b;
      b.ballot_number = r.u64();
      b.voter_digest = r.digest();
      b.ballot_string = r.str();
      out = std::move(b);
      break;
    }
    case PayloadKind::sibling: {
      SiblingRecord s;
      s.voter_digest = r.digest();
      s.broadcast_ref = r.u64();
      s.own_ref = r.u64();
      const auto n = read_count(r, bytes.size() - r.position(), 4);
      for (std::uint32_t i = 0; i < n; ++i) s.opening.indexes.push_back(r.u32());
      out = std::move(s);
      break;
    }
    default:
      throw ParseError("unknown payload kind " + std::to_string(tag), base_offset);
  }
  r.expect_end("payload");
  return out;
}

std::optional<PayloadKind> peek_kind(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) return std::nullopt;
  const auto tag = bytes[0];
  if (tag < 1 || tag > 4) return std::nullopt;
  return static_cast<PayloadKind>(tag);
}

std::string Block::to_line() const {
  Bytes all = header.serialize();
  all.insert(all.end(), payload.begin(), payload.end());
  return to_hex(all);
}

Block Block::from_line(std::string_view hex_line, std::size_t file_offset) {
  Bytes bytes;
  try {
    bytes = from_hex(hex_line);
  } catch (const ValidationError& e) {
    // Locate the bad character for the offset.
    std::size_t bad = hex_line.size();
    for (std::size_t i = 0; i < hex_line.size(); ++i) {
      const char c = hex_line[i];
      if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'))) {
        bad = i;
        break;
      }
    }
    throw ParseError(std::string("block line is not valid hex: ") + e.what(), file_offset + bad);
  }
  if (bytes.size() < BlockHeader::kEncodedSize) {
    throw ParseError("truncated block: " + std::to_string(bytes.size()) + " bytes, header needs " +
                         std::to_string(BlockHeader::kEncodedSize),
                     file_offset + hex_line.size());
  }
  Block block;
  block.header = BlockHeader::parse(std::span(bytes).first(BlockHeader::kEncodedSize), file_offset);
  block.payload.assign(bytes.begin() + BlockHeader::kEncodedSize, bytes.end());
  try {
    (void)decode_payload(block.payload);
  } catch (const ParseError& e) {
    // Report in file coordinates: two hex characters per byte.
    const std::size_t at = file_offset + 2 * (BlockHeader::kEncodedSize + e.offset());
    throw ParseError("malformed block payload", at);
  }
  return block;
}

bool meets_difficulty(const Digest& hash, unsigned difficulty) { return hash.leading_zero_bits() >= difficulty; }

BlockHeader mine(std::span<const std::uint8_t> payload, const Digest& prev_hash, std::uint64_t ref_number,
                 Timestamp timestamp, unsigned difficulty) {
  if (difficulty > kMaxDifficulty) {
    throw RangeError("difficulty " + std::to_string(difficulty) + " exceeds the simulation bound of " +
                     std::to_string(kMaxDifficulty));
  }
  BlockHeader header{ref_number, prev_hash, sha256(payload), timestamp, 0};
  Bytes bytes = header.serialize();
  const std::size_t nonce_at = BlockHeader::kEncodedSize - 8;
  for (std::uint64_t nonce = 0;; ++nonce) {
    for (int i = 0; i < 8; ++i) bytes[nonce_at + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    if (meets_difficulty(sha256(bytes), difficulty)) {
      header.nonce = nonce;
      return header;
    }
    if (nonce == std::numeric_limits<std::uint64_t>::max()) break;
  }
  throw MiningError("nonce space exhausted");
}

Block mine_block(const Payload& payload, const Digest& prev_hash, std::uint64_t ref_number, Timestamp timestamp,
                 unsigned difficulty) {
  Block block;
  block.payload = encode_payload(payload);
  block.header = mine(block.payload, prev_hash, ref_number, timestamp, difficulty);
  return block;
}

void ChainState::append(Block block) {
  if (block.header.ref_number != next_ref()) {
    throw LinkError("block ref " + std::to_string(block.header.ref_number) + " does not follow tip ref " +
                    (blocks_.empty() ? std::string("(none)") : std::to_string(blocks_.size() - 1)));
  }
  if (block.header.prev_hash != tip_hash()) {
    throw LinkError("block " + std::to_string(block.header.ref_number) + " has a stale prev_hash");
  }
  if (sha256(block.payload) != block.header.payload_hash) {
    throw LinkError("block " + std::to_string(block.header.ref_number) + " payload does not match its hash");
  }
  Payload payload;
  try {
    payload = block.decode();
  } catch (const ParseError& e) {
    throw LinkError("block " + std::to_string(block.header.ref_number) + " payload is undecodable: " + e.what());
  }
  index(block, payload);
  blocks_.push_back(std::move(block));
}

void ChainState::index(const Block& block, const Payload& payload) {
  const std::uint64_t ref = block.header.ref_number;
  if (const auto* g = std::get_if<GenesisRecord>(&payload)) {
    if (!genesis_) genesis_ = *g;
  } else if (const auto* s = std::get_if<ScheduleRecord>(&payload)) {
    if (!schedule_) schedule_ = *s;
  } else if (const auto* b = std::get_if<Ballot>(&payload)) {
    ballot_by_digest_.emplace(b->voter_digest, ref);
    ballot_numbers_.insert(b->ballot_number);
  } else if (const auto* sib = std::get_if<SiblingRecord>(&payload)) {
    sibling_by_broadcast_.emplace(sib->broadcast_ref, ref);
  }
}

ChainState ChainState::from_blocks_unchecked(std::vector<Block> blocks) {
  ChainState chain;
  for (auto& block : blocks) {
    try {
      chain.index(block, block.decode());
    } catch (const ParseError&) {
      // Left for verify_chain to report.
    }
    chain.blocks_.push_back(std::move(block));
  }
  return chain;
}

const Block& ChainState::at(std::uint64_t ref) const {
  if (ref >= blocks_.size()) {
    throw RangeError("no block with ref " + std::to_string(ref));
  }
  return blocks_[ref];
}

Digest ChainState::tip_hash() const { return blocks_.empty() ? Digest{} : blocks_.back().hash(); }

Timestamp ChainState::tip_timestamp() const {
  return blocks_.empty() ? std::numeric_limits<Timestamp>::min() : blocks_.back().header.timestamp;
}

std::optional<std::uint64_t> ChainState::ballot_ref_for(const Digest& digest) const {
  auto it = ballot_by_digest_.find(digest);
  if (it == ballot_by_digest_.end()) return std::nullopt;
  return it->second;
}

void ChainState::tamper_bit(std::uint64_t ref, std::size_t bit) {
  if (ref >= blocks_.size()) {
    throw RangeError("no block with ref " + std::to_string(ref));
  }
  Block& block = blocks_[ref];
  constexpr std::size_t header_bits = BlockHeader::kEncodedSize * 8;
  const auto mask = [](std::size_t b) { return static_cast<std::uint8_t>(0x80u >> (b % 8)); };
  if (bit < header_bits) {
    Bytes bytes = block.header.serialize();
    bytes[bit / 8] ^= mask(bit);
    block.header = BlockHeader::parse(bytes);
    return;
  }
  const std::size_t payload_bit = bit - header_bits;
  if (payload_bit >= block.payload.size() * 8) {
    throw RangeError("bit " + std::to_string(bit) + " is outside block " + std::to_string(ref));
  }
  block.payload[payload_bit / 8] ^= mask(payload_bit);
}

std::string ChainState::to_text() const {
  std::string out;
  for (const auto& block : blocks_) {
    out += block.to_line();
    out += '\n';
  }
  return out;
}

ChainState ChainState::from_text(std::string_view text) {
  std::vector<Block> blocks;
  std::size_t offset = 0;
  while (offset < text.size()) {
    std::size_t end = text.find('\n', offset);
    const bool terminated = end != std::string_view::npos;
    if (!terminated) end = text.size();
    std::string_view line = text.substr(offset, end - offset);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      blocks.push_back(Block::from_line(line, offset));
    }
    offset = terminated ? end + 1 : end;
  }
  return from_blocks_unchecked(std::move(blocks));
}

namespace {

bool nonce_is_minimal(const BlockHeader& header, unsigned difficulty) {
  if (header.nonce == 0) return true;
  Bytes bytes = header.serialize();
  const std::size_t nonce_at = BlockHeader::kEncodedSize - 8;
  for (std::uint64_t nonce = 0; nonce < header.nonce; ++nonce) {
    for (int i = 0; i < 8; ++i) bytes[nonce_at + i] = static_cast<std::uint8_t>(nonce >> (56 - 8 * i));
    if (meets_difficulty(sha256(bytes), difficulty)) return false;
  }
  return true;
}

}  // namespace

ChainVerdict verify_chain(const ChainState& chain, unsigned difficulty) {
  const auto blocks = chain.blocks();
  Digest prev{};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& block = blocks[i];
    const BlockHeader& h = block.header;
    if (h.ref_number != i) return ChainVerdict::broken(i, "ref-number");
    if (h.prev_hash != prev) return ChainVerdict::broken(i, "prev-hash");
    if (sha256(block.payload) != h.payload_hash) return ChainVerdict::broken(i, "payload-hash");
    const Digest hash = h.hash();
    if (!meets_difficulty(hash, difficulty)) return ChainVerdict::broken(i, "proof-of-work");
    if (!nonce_is_minimal(h, difficulty)) return ChainVerdict::broken(i, "nonce-not-minimal");
    if (i > 0 && h.timestamp < blocks[i - 1].header.timestamp) return ChainVerdict::broken(i, "timestamp");
    try {
      const Payload payload = block.decode();
      const bool genesis = std::holds_alternative<GenesisRecord>(payload);
      if ((i == 0) != genesis) return ChainVerdict::broken(i, "payload-kind");
    } catch (const ParseError&) {
      return ChainVerdict::broken(i, "payload-decode");
    }
    prev = hash;
  }
  return ChainVerdict::good();
}

void SiblingVault::hold(SiblingRecord sibling) {
  if (reveal_open_) {
    throw PhaseError("siblings can only be held during voting");
  }
  auto it = std::lower_bound(held_.begin(), held_.end(), sibling.broadcast_ref,
                             [](const SiblingRecord& s, std::uint64_t ref) { return s.broadcast_ref < ref; });
  if (it != held_.end() && it->broadcast_ref == sibling.broadcast_ref) {
    throw IntegrityError("vault already holds a sibling for block " + std::to_string(sibling.broadcast_ref));
  }
  held_.insert(it, std::move(sibling));
}

bool SiblingVault::discard(std::uint64_t broadcast_ref) { return withdraw(broadcast_ref).has_value(); }

std::optional<SiblingRecord> SiblingVault::withdraw(std::uint64_t broadcast_ref) {
  auto it = std::find_if(held_.begin(), held_.end(),
                         [&](const SiblingRecord& s) { return s.broadcast_ref == broadcast_ref; });
  if (it == held_.end()) return std::nullopt;
  SiblingRecord out = std::move(*it);
  held_.erase(it);
  return out;
}

std::vector<SiblingRecord> SiblingVault::release() {
  if (!reveal_open_) {
    throw PhaseError("siblings cannot be released before post-voting");
  }
  std::vector<SiblingRecord> out = std::move(held_);
  held_.clear();
  return out;
}

bool SiblingVault::contains(std::uint64_t broadcast_ref) const {
  return std::any_of(held_.begin(), held_.end(),
                     [&](const SiblingRecord& s) { return s.broadcast_ref == broadcast_ref; });
}

std::vector<std::uint64_t> SiblingVault::refs() const {
  std::vector<std::uint64_t> out;
  out.reserve(held_.size());
  for (const auto& s : held_) out.push_back(s.broadcast_ref);
  return out;
}

}  // namespace evote
