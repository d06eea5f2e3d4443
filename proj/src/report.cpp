#include "dtnjordan/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dtnjordan/errors.hpp"

namespace dtnjordan {

nlohmann::json report_to_json(const VerificationReport& report) {
    nlohmann::json j;
    j["name"] = report.name;
    j["passed"] = report.passed;
    nlohmann::json residuals = nlohmann::json::object();
    for (const auto& [k, v] : report.residuals)
        residuals[k] = v;
    nlohmann::json tolerances = nlohmann::json::object();
    for (const auto& [k, v] : report.tolerances)
        tolerances[k] = v;
    nlohmann::json context = nlohmann::json::object();
    for (const auto& [k, v] : report.context)
        context[k] = v;
    j["residuals"] = residuals;
    j["tolerances"] = tolerances;
    j["context"] = context;
    return j;
}

nlohmann::json make_report_bundle(const nlohmann::json& config_echo,
                                  const std::vector<VerificationReport>& reports) {
    nlohmann::json bundle;
    bundle["schema_version"] = kReportSchemaVersion;
    bundle["tool"] = "dtnjordan";
    bundle["config"] = config_echo;
    nlohmann::json rs = nlohmann::json::array();
    int n_passed = 0;
    for (const auto& r : reports) {
        rs.push_back(report_to_json(r));
        if (r.passed)
            ++n_passed;
    }
    bundle["reports"] = rs;
    bundle["summary"] = {{"passed", n_passed == static_cast<int>(reports.size())},
                         {"n_passed", n_passed},
                         {"n_total", static_cast<int>(reports.size())}};
    return bundle;
}

std::string summary_text(const nlohmann::json& bundle) {
    std::ostringstream os;
    os << "dtnjordan report (schema " << bundle.at("schema_version").get<std::string>() << ")\n";
    for (const auto& r : bundle.at("reports")) {
        os << (r.at("passed").get<bool>() ? "[PASS] " : "[FAIL] ")
           << r.at("name").get<std::string>();
        double worst = 0.0;
        std::string worst_key;
        for (const auto& [key, value] : r.at("residuals").items()) {
            const double tol = r.at("tolerances").at(key).get<double>();
            const double ratio = tol > 0.0 ? value.get<double>() / tol : 0.0;
            if (ratio >= worst) {
                worst = ratio;
                worst_key = key;
            }
        }
        if (!worst_key.empty())
            os << "  (worst residual/tol = " << worst << " at " << worst_key << ")";
        const auto& context = r.at("context");
        if (context.contains("error"))
            os << "  [" << context.at("reason").get<std::string>() << "]";
        os << "\n";
    }
    const auto& s = bundle.at("summary");
    os << (s.at("passed").get<bool>() ? "ALL CHECKS PASSED" : "CHECKS FAILED") << " ("
       << s.at("n_passed").get<int>() << "/" << s.at("n_total").get<int>() << ")\n";
    return os.str();
}

void write_report_bundle(const nlohmann::json& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream os(std::filesystem::path(out_dir) / "report.json");
        os << bundle.dump(2) << "\n";
    }
    {
        std::ofstream os(std::filesystem::path(out_dir) / "summary.txt");
        os << summary_text(bundle);
    }
}

nlohmann::json load_report_bundle(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("load_report_bundle: cannot open " + path);
    nlohmann::json bundle;
    try {
        is >> bundle;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("load_report_bundle: invalid JSON in " + path + ": " + e.what());
    }
    if (!bundle.contains("schema_version") ||
        bundle["schema_version"].get<std::string>() != kReportSchemaVersion)
        throw ConfigError("load_report_bundle: unsupported report schema version in " + path);
    return bundle;
}

} // namespace dtnjordan
