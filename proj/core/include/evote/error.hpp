#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evote {

// Base for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input outside an allowed domain (grid cell, index, difficulty).
class RangeError : public Error {
 public:
  using Error::Error;
};

// Malformed caller-supplied value (non-binary string, empty digest input).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent parameters (odd ballot length, code longer than the choice half).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Registry or vault contents violate a uniqueness rule.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

class MiningError : public Error {
 public:
  using Error::Error;
};

// A block does not extend the local chain tip.
class LinkError : public Error {
 public:
  using Error::Error;
};

// Operation attempted in the wrong election phase.
class PhaseError : public Error {
 public:
  using Error::Error;
};

// Opening value does not decode to a plan code.
class MalformedReveal : public Error {
 public:
  using Error::Error;
};

// Honest peers disagree on chain contents or tallies.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  explicit ParseError(const std::string& what) : Error(what) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_ = 0;
};

}  // namespace evote
