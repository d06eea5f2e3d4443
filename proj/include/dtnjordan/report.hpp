#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dtnjordan/verify.hpp"

namespace dtnjordan {

inline constexpr const char* kReportSchemaVersion = "1";

nlohmann::json report_to_json(const VerificationReport& report);

/// Full bundle: schema version, config echo, per-check reports, summary.
nlohmann::json make_report_bundle(const nlohmann::json& config_echo,
                                  const std::vector<VerificationReport>& reports);

std::string summary_text(const nlohmann::json& bundle);

/// Writes report.json and summary.txt into out_dir (created if needed).
void write_report_bundle(const nlohmann::json& bundle, const std::string& out_dir);

/// Reads a bundle back; rejects unknown schema versions with ConfigError.
nlohmann::json load_report_bundle(const std::string& path);

} // namespace dtnjordan
