#include "ample/report.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace ample::harness {

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "PASS";
        case Verdict::Fail: return "FAIL";
        case Verdict::Info: return "INFO";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

namespace {

// 12 significant digits; reparsed so the JSON layer serializes the rounded value.
double round12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

nlohmann::json metric_json(const Metric& m) {
    return {{"name", m.name},
            {"value", round12(m.value)},
            {"tolerance", round12(m.tolerance)},
            {"relation", m.relation}};
}

} // namespace

Verdict DiagnosticsReport::overall() const {
    for (const auto& c : checks)
        if (c.verdict == Verdict::Fail) return Verdict::Fail;
    return Verdict::Pass;
}

nlohmann::json DiagnosticsReport::to_json(bool include_timing) const {
    nlohmann::json checks_json = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json residuals = nlohmann::json::array();
        for (const auto& m : c.residuals) residuals.push_back(metric_json(m));
        nlohmann::json entry = {
            {"name", c.name},
            {"verdict", to_string(c.verdict)},
            {"tolerance", c.residuals.empty()
                              ? nlohmann::json(nullptr)
                              : nlohmann::json({{"name", c.residuals.front().name},
                                                {"value", round12(c.residuals.front().tolerance)}})},
            {"residuals", residuals},
            {"witnesses", c.witnesses},
            {"paper_ref", c.claim},
        };
        if (!c.note.empty()) entry["note"] = c.note;
        checks_json.push_back(entry);
    }
    nlohmann::json out = {
        {"version", kSchemaVersion},
        {"suite", suite},
        {"seed", config.seed},
        {"overall", to_string(overall())},
        {"config_echo", serialize_config(config)},
        {"checks", checks_json},
    };
    if (include_timing) out["wall_time_s"] = round12(wall_time_s);
    return out;
}

std::string DiagnosticsReport::to_text() const {
    std::ostringstream out;
    out << "suite " << suite << "  seed " << config.seed << "  overall "
        << to_string(overall()) << "\n";
    for (const auto& c : checks) {
        out << "  [" << to_string(c.verdict) << "] " << c.name;
        for (const auto& m : c.residuals) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6g", m.value);
            out << "  " << m.name << "=" << buf;
            if (!m.relation.empty()) {
                std::snprintf(buf, sizeof(buf), "%.3g", m.tolerance);
                out << " (" << m.relation << " " << buf << ")";
            }
        }
        if (!c.note.empty()) out << "  -- " << c.note;
        out << "\n";
    }
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", wall_time_s);
    out << "  wall time " << buf << " s\n";
    return out.str();
}

void emit_report(const DiagnosticsReport& report, const std::string& format, const std::string& path) {
    std::string payload;
    if (format == "json")
        payload = report.to_json().dump(2) + "\n";
    else if (format == "text")
        payload = report.to_text();
    else
        throw ConfigError("unknown report format: " + format);

    if (path.empty()) {
        std::cout << payload;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report to " + path);
    out << payload;
}

int exit_code(const DiagnosticsReport& report) {
    return report.overall() == Verdict::Fail ? 1 : 0;
}

} // namespace ample::harness
