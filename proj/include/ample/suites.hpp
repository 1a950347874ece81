#pragma once

#include <string>
#include <vector>

#include "ample/report.hpp"

namespace ample::harness {

struct SuiteInfo {
    std::string name;
    std::string description;
};

const std::vector<SuiteInfo>& list_suites();

/// Runs the named verification suite. Check-level errors become failed
/// verdicts; only configuration problems (unknown suite) throw.
DiagnosticsReport run_suite(const SuiteConfig& config);

} // namespace ample::harness
