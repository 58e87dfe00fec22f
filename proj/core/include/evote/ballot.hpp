#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "evote/hash.hpp"
#include "evote/rng.hpp"

namespace evote {

struct Nominee {
  std::string id;
  std::string label;
  bool operator==(const Nominee&) const = default;
};

struct NomineeCode {
  std::string nominee_id;
  std::string label;
  std::string code;
  bool operator==(const NomineeCode&) const = default;
};

// Constant-weight codes for every nominee: same length, same number of 1s,
// so the count of 1s in a ballot never hints at the choice.
struct CodePlan {
  std::size_t code_bits = 0;
  std::size_t weight = 0;
  std::vector<NomineeCode> codes;

  /// Throws ValidationError for an unknown nominee.
  const std::string& code_for(std::string_view nominee_id) const;
  std::optional<std::string> nominee_for(std::string_view code) const;

  bool operator==(const CodePlan&) const = default;
};

struct CodeShape {
  std::size_t code_bits = 0;
  std::size_t weight = 0;
};

std::uint64_t binomial(std::size_t n, std::size_t k);

/// Smallest code length (at least 2) with C(n, ceil(n/2)) >= count.
/// Throws ParameterError when count is zero.
CodeShape code_shape(std::size_t count);

/// The first `limit` n-bit strings of the given weight, descending numerically.
std::vector<std::string> constant_weight_codes(std::size_t code_bits, std::size_t weight,
                                               std::size_t limit);

CodePlan assign_codes(const std::vector<Nominee>& nominees);

// Ordered index tuple locating the code bits inside the choice half.
// Position i of the code goes to indexes[i].
struct OpeningValue {
  std::vector<std::size_t> indexes;
  bool operator==(const OpeningValue&) const = default;
};

// Every random decision made while building one ballot string.
struct BallotDraws {
  OpeningValue opening;
  bool filler = false;
  std::string nonce;  // N/2 bits for the random half
};

BallotDraws draw_ballot(std::size_t code_bits, std::size_t ballot_bits, Rng& rng);

struct EncodedBallot {
  std::string bits;
  OpeningValue opening;
};

/// Places `code` at the opening indexes, the filler bit at every other
/// choice index and the nonce in the random half.
EncodedBallot encode_ballot(std::string_view code, std::size_t ballot_bits, const BallotDraws& draws);
EncodedBallot encode_ballot(std::string_view code, std::size_t ballot_bits, Rng& rng);

/// Reads the bits at the opening indexes, in order. Throws MalformedReveal
/// when the opening does not fit the ballot.
std::string extract_code(std::string_view ballot_string, const OpeningValue& opening);

/// Throws MalformedReveal when the extracted code is not in the plan.
std::string decode_choice(std::string_view ballot_string, const OpeningValue& opening,
                          const CodePlan& plan);

struct Ballot {
  std::uint64_t ballot_number = 0;
  Digest voter_digest;
  std::string ballot_string;
  bool operator==(const Ballot&) const = default;
};

enum class FormatIssue { length, non_bit, ballot_number, duplicate_number, digest };

std::string_view to_string(FormatIssue issue);

struct FormatVerdict {
  std::optional<FormatIssue> issue;
  bool valid() const { return !issue.has_value(); }
};

/// Stateless checks: length, alphabet, positive number, non-zero digest.
FormatVerdict check_format(const Ballot& ballot, std::size_t ballot_bits);

// isCorrectFormat with ballot-number uniqueness across everything it has
// accepted so far. Choice content cannot be checked before reveal.
class FormatValidator {
 public:
  explicit FormatValidator(std::size_t ballot_bits) : ballot_bits_(ballot_bits) {}

  FormatVerdict check(const Ballot& ballot);
  bool seen(std::uint64_t ballot_number) const { return seen_.contains(ballot_number); }

 private:
  std::size_t ballot_bits_;
  std::unordered_set<std::uint64_t> seen_;
};

}  // namespace evote
