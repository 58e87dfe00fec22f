#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "evote/hash.hpp"
#include "evote/types.hpp"

namespace evote {

// Canonical big-endian writer. Variable-length fields carry a u32 length prefix.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void digest(const Digest& d);
  void str(std::string_view s);
  void raw(std::span<const std::uint8_t> bytes);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Bounds-checked reader; every failure is a ParseError carrying the
// absolute offset (base + position).
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data, std::size_t base_offset = 0)
      : data_(data), base_(base_offset) {}

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  Digest digest();
  std::string str();

  std::size_t position() const { return pos_; }
  std::size_t offset() const { return base_ + pos_; }
  bool done() const { return pos_ == data_.size(); }
  /// Throws unless every byte was consumed.
  void expect_end(std::string_view what) const;

  [[noreturn]] void fail(const std::string& what) const;

 private:
  void need(std::size_t n, std::string_view what) const;

  std::span<const std::uint8_t> data_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

}  // namespace evote
