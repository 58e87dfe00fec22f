#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "evote/types.hpp"

namespace evote {

/// A 256-bit SHA-256 value. Serialized as lowercase hex.
class Digest {
 public:
  static constexpr std::size_t kSize = 32;

  Digest() = default;
  explicit Digest(const std::array<std::uint8_t, kSize>& bytes) : bytes_(bytes) {}

  /// Parses exactly 64 hex characters; throws ValidationError otherwise.
  static Digest from_hex(std::string_view hex);
  static Digest from_bytes(std::span<const std::uint8_t> bytes);

  std::string hex() const;
  std::span<const std::uint8_t, kSize> bytes() const { return bytes_; }

  bool is_zero() const;
  unsigned leading_zero_bits() const;

  auto operator<=>(const Digest&) const = default;

 private:
  std::array<std::uint8_t, kSize> bytes_{};
};

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

std::string to_hex(std::span<const std::uint8_t> data);
/// Throws ValidationError on odd length or non-hex characters.
Bytes from_hex(std::string_view hex);

}  // namespace evote

template <>
struct std::hash<evote::Digest> {
  std::size_t operator()(const evote::Digest& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) {
      h = (h << 8) | d.bytes()[i];
    }
    return h;
  }
};
