#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ensel/config.hpp"
#include "ensel/harness.hpp"

namespace ensel {

inline constexpr const char* kReportSchemaId = "ensel-report/1";

/// Canonical report payload. Contains no timestamps, host names or thread
/// counts, so equal configs serialize to identical bytes.
nlohmann::ordered_json report_to_json(const ExperimentReport& report, const RunConfig& config);

/// Writes report.json plus one curve_<name>.csv per algorithm (best epsilon)
/// and per baseline. Returns the files written.
std::vector<std::filesystem::path> write_report(const nlohmann::ordered_json& report,
                                                const std::filesystem::path& dir);

/// Queries understood by inspect().
std::vector<std::string> inspect_queries();

/// Renders a slice of a report as text: "summary", "parsimony", "baselines",
/// "path" or "curve:<algorithm>". Throws config_error for anything else.
std::string inspect(const nlohmann::json& report, std::string_view query);

}  // namespace ensel
