#include "evote/rng.hpp"

#include <limits>

#include "evote/error.hpp"

namespace evote {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) {
    throw ParameterError("Rng::below requires a positive bound");
  }
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % bound + 1) % bound;
  std::uint64_t x = engine_();
  while (x > limit) {
    x = engine_();
  }
  return x % bound;
}

}  // namespace evote
