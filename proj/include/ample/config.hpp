#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <utility>

#include "ample/degeneration.hpp"
#include "ample/theta.hpp"

namespace ample::harness {

/// Configuration failure; carries the file position when one is known.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0, int column = 0)
        : std::runtime_error(line > 0 ? msg + " (line " + std::to_string(line) + ", column " +
                                            std::to_string(column) + ")"
                                      : msg),
          line(line),
          column(column) {}
    int line = 0;
    int column = 0;
};

/// Flat key-value configuration with sections [run], [model], [tolerances],
/// [budgets]. Unknown keys are rejected. Matrix entries are given per key as
/// real/imaginary pairs: tau_<i>_<j>_re and tau_<i>_<j>_im with 1 <= i <= j <= g.
struct SuiteConfig {
    // [run]
    std::string suite = "full";
    std::uint64_t seed = 20260810;

    // [model]
    int g = 2;
    int d = 5;
    std::map<std::pair<int, int>, std::complex<double>> tau; // explicit entries, 1-based i<=j
    double t_scale_coarse = 1e-2;
    double t_scale_fine = 1e-4;

    // [tolerances]
    double tol = 1e-12;
    double tol_rel = 1e-8;
    double delta_bpf = 1e-6;
    double delta_coll = 1e-8;
    double eig_floor = 0.05;
    double genericity_tol = 1e-9;
    double separation_floor = 1e-3;

    // [budgets]
    long samples = 400;
    long restarts = 10000;
    int iterations = 120;
    int n_rel = 8;
    int points_per_stratum = 20;
    int g_max = 6;
    int box_radius = 6;
    int max_radius = 64;
    int quasi_checks = 100;
    int lattice_g_max = 5;
    int lattice_entry_bound = 3;

    /// Entry (i, j), 1-based, with the documented generic defaults filled in
    /// for anything not explicitly configured.
    std::complex<double> tau_entry(int i, int j) const;

    bool operator==(const SuiteConfig&) const = default;
};

SuiteConfig parse_config(const std::string& text, const std::string& origin = "<string>");
SuiteConfig load_config(const std::string& path);
std::string serialize_config(const SuiteConfig& config);
void validate_config(const SuiteConfig& config);

/// Degeneration model built from the configured mixed and off-diagonal
/// entries; runs the genericity certificate.
degen::DegenerationModel make_model(const SuiteConfig& config);

/// Full Siegel matrix from the configured entries (diagonals included).
theta::SiegelPoint make_siegel(const SuiteConfig& config);

theta::EvalOptions eval_options(const SuiteConfig& config);

} // namespace ample::harness
