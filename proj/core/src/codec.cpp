#include "evote/codec.hpp"

#include "evote/error.hpp"

namespace evote {

void ByteWriter::u32(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64(std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::digest(const Digest& d) { raw(d.bytes()); }

void ByteWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  out_.insert(out_.end(), s.begin(), s.end());
}

void ByteWriter::raw(std::span<const std::uint8_t> bytes) { out_.insert(out_.end(), bytes.begin(), bytes.end()); }

void ByteReader::need(std::size_t n, std::string_view what) const {
  if (data_.size() - pos_ < n) {
    fail("truncated " + std::string(what) + ": need " + std::to_string(n) + " bytes, " +
         std::to_string(data_.size() - pos_) + " left");
  }
}

void ByteReader::fail(const std::string& what) const { throw ParseError(what, offset()); }

std::uint8_t ByteReader::u8() {
  need(1, "u8");
  return data_[pos_++];
}

std::uint32_t ByteReader::u32() {
  need(4, "u32");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

std::uint64_t ByteReader::u64() {
  need(8, "u64");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | data_[pos_++];
  return v;
}

Digest ByteReader::digest() {
  need(Digest::kSize, "digest");
  Digest d = Digest::from_bytes(data_.subspan(pos_, Digest::kSize));
  pos_ += Digest::kSize;
  return d;
}

std::string ByteReader::str() {
  const std::uint32_t len = u32();
  need(len, "string");
  std::string s(reinterpret_cast<const char*>(data_.data() + pos_), len);
  pos_ += len;
  return s;
}

void ByteReader::expect_end(std::string_view what) const {
  if (!done()) {
    fail(std::to_string(data_.size() - pos_) + " trailing bytes after " + std::string(what));
  }
}

}  // namespace evote
