#pragma once

#include <cstdint>
#include <vector>

namespace evote {

// Simulated seconds on the logical election clock.
using Timestamp = std::int64_t;
using Duration = std::int64_t;

using Bytes = std::vector<std::uint8_t>;

}  // namespace evote
