#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "blocksymm/bounds_mc.hpp"

namespace blocksymm {

inline constexpr int kReportSchemaVersion = 1;

[[nodiscard]] nlohmann::json to_json(const ExpectationEstimate& e);
[[nodiscard]] nlohmann::json to_json(const RhoEstimate& r);
[[nodiscard]] nlohmann::json to_json(const VerificationReport& report);

/// Fixed summary columns, one row per inequality.
[[nodiscard]] const std::vector<std::string>& summary_columns();

void write_summary_header(std::ostream& out);
void write_summary_rows(std::ostream& out, const VerificationReport& report);

/// Pretty JSON with a trailing newline; identical input gives identical bytes.
[[nodiscard]] std::string dump_report(const nlohmann::json& j);

}  // namespace blocksymm
