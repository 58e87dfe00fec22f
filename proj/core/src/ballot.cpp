#include "evote/ballot.hpp"

#include <algorithm>

#include "evote/error.hpp"
#include "evote/identity.hpp"

namespace evote {

const std::string& CodePlan::code_for(std::string_view nominee_id) const {
  for (const auto& entry : codes) {
    if (entry.nominee_id == nominee_id) return entry.code;
  }
  throw ValidationError("unknown nominee '" + std::string(nominee_id) + "'");
}

std::optional<std::string> CodePlan::nominee_for(std::string_view code) const {
  for (const auto& entry : codes) {
    if (entry.code == code) return entry.nominee_id;
  }
  return std::nullopt;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
  }
  return result;
}

CodeShape code_shape(std::size_t count) {
  if (count == 0) {
    throw ParameterError("a code plan needs at least one nominee");
  }
  for (std::size_t n = 2;; ++n) {
    const std::size_t preferred = (n + 1) / 2;
    if (binomial(n, preferred) >= count) return {n, preferred};
    // Central weight maximises C(n, w); kept for completeness.
    for (std::size_t d = 1; d <= n; ++d) {
      if (preferred >= d && binomial(n, preferred - d) >= count) return {n, preferred - d};
      if (preferred + d <= n && binomial(n, preferred + d) >= count) return {n, preferred + d};
    }
  }
}

std::vector<std::string> constant_weight_codes(std::size_t code_bits, std::size_t weight,
                                               std::size_t limit) {
  std::vector<std::string> out;
  if (weight > code_bits) return out;
  // Ascending lexicographic order of the 1-positions (0 = most significant
  // bit) is descending numeric order of the codes.
  std::vector<std::size_t> pos(weight);
  for (std::size_t i = 0; i < weight; ++i) pos[i] = i;
  while (out.size() < limit) {
    std::string code(code_bits, '0');
    for (auto p : pos) code[p] = '1';
    out.push_back(std::move(code));

    std::size_t i = weight;
    while (i > 0 && pos[i - 1] == code_bits - weight + (i - 1)) --i;
    if (i == 0) break;
    ++pos[i - 1];
    for (std::size_t j = i; j < weight; ++j) pos[j] = pos[j - 1] + 1;
  }
  return out;
}

CodePlan assign_codes(const std::vector<Nominee>& nominees) {
  const CodeShape shape = code_shape(nominees.size());
  for (std::size_t i = 0; i < nominees.size(); ++i) {
    for (std::size_t j = i + 1; j < nominees.size(); ++j) {
      if (nominees[i].id == nominees[j].id) {
        throw ParameterError("duplicate nominee id '" + nominees[i].id + "'");
      }
    }
  }
  const auto codes = constant_weight_codes(shape.code_bits, shape.weight, nominees.size());
  CodePlan plan{shape.code_bits, shape.weight, {}};
  plan.codes.reserve(nominees.size());
  for (std::size_t i = 0; i < nominees.size(); ++i) {
    plan.codes.push_back(NomineeCode{nominees[i].id, nominees[i].label, codes[i]});
  }
  return plan;
}

namespace {

void check_lengths(std::size_t code_bits, std::size_t ballot_bits) {
  if (ballot_bits == 0 || ballot_bits % 2 != 0) {
    throw ParameterError("ballot length must be a positive even number, got " + std::to_string(ballot_bits));
  }
  if (code_bits == 0 || code_bits > ballot_bits / 2) {
    throw ParameterError("code of " + std::to_string(code_bits) + " bits does not fit a " +
                         std::to_string(ballot_bits / 2) + "-bit choice half");
  }
}

}  // namespace

BallotDraws draw_ballot(std::size_t code_bits, std::size_t ballot_bits, Rng& rng) {
  check_lengths(code_bits, ballot_bits);
  const std::size_t half = ballot_bits / 2;
  BallotDraws draws;
  std::vector<bool> taken(half, false);
  while (draws.opening.indexes.size() < code_bits) {
    const auto index = static_cast<std::size_t>(rng.below(half));
    if (taken[index]) continue;
    taken[index] = true;
    draws.opening.indexes.push_back(index);
  }
  draws.filler = rng.bit();
  draws.nonce.reserve(half);
  for (std::size_t i = 0; i < half; ++i) {
    draws.nonce.push_back(rng.bit() ? '1' : '0');
  }
  return draws;
}

EncodedBallot encode_ballot(std::string_view code, std::size_t ballot_bits, const BallotDraws& draws) {
  check_lengths(code.size(), ballot_bits);
  if (!is_bit_string(code)) {
    throw ParameterError("nominee code must be a bit string");
  }
  const std::size_t half = ballot_bits / 2;
  if (draws.opening.indexes.size() != code.size()) {
    throw ParameterError("opening value has " + std::to_string(draws.opening.indexes.size()) +
                         " indexes for a " + std::to_string(code.size()) + "-bit code");
  }
  if (draws.nonce.size() != half || !is_bit_string(draws.nonce)) {
    throw ParameterError("random half must be " + std::to_string(half) + " bits");
  }

  std::string bits(ballot_bits, draws.filler ? '1' : '0');
  std::vector<bool> used(half, false);
  for (std::size_t i = 0; i < code.size(); ++i) {
    const std::size_t index = draws.opening.indexes[i];
    if (index >= half || used[index]) {
      throw ParameterError("opening indexes must be distinct and below " + std::to_string(half));
    }
    used[index] = true;
    bits[index] = code[i];
  }
  std::copy(draws.nonce.begin(), draws.nonce.end(), bits.begin() + static_cast<std::ptrdiff_t>(half));
  return EncodedBallot{std::move(bits), draws.opening};
}

EncodedBallot encode_ballot(std::string_view code, std::size_t ballot_bits, Rng& rng) {
  return encode_ballot(code, ballot_bits, draw_ballot(code.size(), ballot_bits, rng));
}

std::string extract_code(std::string_view ballot_string, const OpeningValue& opening) {
  const std::size_t half = ballot_string.size() / 2;
  if (ballot_string.empty() || ballot_string.size() % 2 != 0 || !is_bit_string(ballot_string)) {
    throw MalformedReveal("ballot string is not an even-length bit string");
  }
  std::string code;
  code.reserve(opening.indexes.size());
  std::vector<bool> used(half, false);
  for (auto index : opening.indexes) {
    if (index >= half) {
      throw MalformedReveal("opening index " + std::to_string(index) + " lies outside the choice half");
    }
    if (used[index]) {
      throw MalformedReveal("opening index " + std::to_string(index) + " repeats");
    }
    used[index] = true;
    code.push_back(ballot_string[index]);
  }
  return code;
}

std::string decode_choice(std::string_view ballot_string, const OpeningValue& opening, const CodePlan& plan) {
  if (opening.indexes.size() != plan.code_bits) {
    throw MalformedReveal("opening has " + std::to_string(opening.indexes.size()) + " indexes, plan codes have " +
                          std::to_string(plan.code_bits) + " bits");
  }
  const std::string code = extract_code(ballot_string, opening);
  auto nominee = plan.nominee_for(code);
  if (!nominee) {
    throw MalformedReveal("extracted code " + code + " is not assigned to any nominee");
  }
  return *nominee;
}

std::string_view to_string(FormatIssue issue) {
  switch (issue) {
    case FormatIssue::length: return "length";
    case FormatIssue::non_bit: return "non-bit";
    case FormatIssue::ballot_number: return "ballot-number";
    case FormatIssue::duplicate_number: return "duplicate-number";
    case FormatIssue::digest: return "digest";
  }
  return "unknown";
}

FormatVerdict check_format(const Ballot& ballot, std::size_t ballot_bits) {
  if (ballot.ballot_string.size() != ballot_bits) return {FormatIssue::length};
  if (!is_bit_string(ballot.ballot_string)) return {FormatIssue::non_bit};
  if (ballot.ballot_number == 0) return {FormatIssue::ballot_number};
  if (ballot.voter_digest.is_zero()) return {FormatIssue::digest};
  return {};
}

FormatVerdict FormatValidator::check(const Ballot& ballot) {
  FormatVerdict verdict = check_format(ballot, ballot_bits_);
  if (!verdict.valid()) return verdict;
  if (!seen_.insert(ballot.ballot_number).second) return {FormatIssue::duplicate_number};
  return verdict;
}

}  // namespace evote
