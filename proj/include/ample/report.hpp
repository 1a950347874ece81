#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ample/config.hpp"

namespace ample::harness {

enum class Verdict { Pass, Fail, Info, Inconclusive };

std::string to_string(Verdict v);

/// A reported numeric always travels with the bound it was judged against.
struct Metric {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation; // "<", ">", ... relative to the tolerance; "" for info
};

struct CheckResult {
    std::string name;
    std::string claim; // stable claim identifier
    Verdict verdict = Verdict::Info;
    std::vector<Metric> residuals;
    nlohmann::json witnesses = nlohmann::json::array();
    std::string note;
};

struct DiagnosticsReport {
    static constexpr int kSchemaVersion = 1;

    std::string suite;
    SuiteConfig config;
    std::vector<CheckResult> checks;
    double wall_time_s = 0.0;

    Verdict overall() const;
    /// Canonical JSON form; floats are rounded to 12 significant digits so
    /// reruns compare bit-for-bit. Timing is excluded from the canonical form.
    nlohmann::json to_json(bool include_timing = true) const;
    std::string to_text() const;
};

/// Writes the report in the requested format ("json" or "text"); an empty
/// path writes to stdout.
void emit_report(const DiagnosticsReport& report, const std::string& format,
                 const std::string& path);

/// 0 on overall pass, 1 on failure (configuration errors exit 2 upstream).
int exit_code(const DiagnosticsReport& report);

} // namespace ample::harness
