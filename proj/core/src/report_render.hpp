#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

namespace evote::detail {

// Text view of report.json: the whole run, or one ballot's trail.
std::string render_report_text(const nlohmann::json& report, std::optional<std::uint64_t> ballot_number);

}  // namespace evote::detail
