#include "ample/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ample::harness {

namespace {

using Complex = std::complex<double>;

// Documented generic defaults; arbitrary choices, fixed for reproducibility.
Complex default_tau_entry(int i, int j, int g) {
    if (i == j) return (i == g) ? Complex{0.4, 1.1} : Complex{0.0, 2.0};
    if (j == g) {
        static const Complex mixed[4] = {{2.21, 0.38}, {4.13, 0.59}, {1.27, 0.47}, {5.19, 0.53}};
        return mixed[(i - 1) % 4];
    }
    static const Complex off[3] = {{0.31, 0.27}, {0.23, 0.34}, {0.36, 0.29}};
    return off[(i + j) % 3];
}

struct KeyPos {
    int line = 0;
    int column = 0;
};

} // namespace

std::complex<double> SuiteConfig::tau_entry(int i, int j) const {
    if (i > j) std::swap(i, j);
    if (i < 1 || j > g) throw ConfigError("tau index out of range for g=" + std::to_string(g));
    const auto it = tau.find({i, j});
    return it != tau.end() ? it->second : default_tau_entry(i, j, g);
}

SuiteConfig parse_config(const std::string& text, const std::string& origin) {
    SuiteConfig cfg;
    std::map<std::string, std::pair<double, KeyPos>> tau_parts;

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::string section;
    std::map<std::string, bool> seen;

    auto fail = [&](const std::string& msg, int col) -> void {
        throw ConfigError(origin + ": " + msg, line_no, col);
    };

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);

        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header", static_cast<int>(first) + 1);
            section = line.substr(1, line.size() - 2);
            if (section != "run" && section != "model" && section != "tolerances" && section != "budgets")
                fail("unknown section [" + section + "]", static_cast<int>(first) + 1);
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected key = value", static_cast<int>(first) + 1);
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        const auto kend = key.find_last_not_of(" \t");
        key = key.substr(0, kend == std::string::npos ? 0 : kend + 1);
        const auto vstart = value.find_first_not_of(" \t");
        value = vstart == std::string::npos ? "" : value.substr(vstart);
        const int key_col = static_cast<int>(first) + 1;
        if (key.empty()) fail("empty key", key_col);
        if (section.empty()) fail("key outside of any section", key_col);

        const std::string qualified = section + "." + key;
        if (seen[qualified]) fail("duplicate key " + key, key_col);
        seen[qualified] = true;

        auto as_double = [&]() -> double {
            try {
                std::size_t used = 0;
                const double v = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (...) {
                fail("invalid numeric value for " + key, key_col);
            }
            return 0.0;
        };
        auto as_long = [&]() -> long long {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (...) {
                fail("invalid integer value for " + key, key_col);
            }
            return 0;
        };
        auto as_u64 = [&]() -> std::uint64_t {
            try {
                std::size_t used = 0;
                const std::uint64_t v = std::stoull(value, &used);
                if (used != value.size()) throw std::invalid_argument("trailing");
                return v;
            } catch (...) {
                fail("invalid seed value for " + key, key_col);
            }
            return 0;
        };

        if (section == "run") {
            if (key == "suite")
                cfg.suite = value;
            else if (key == "seed")
                cfg.seed = as_u64();
            else
                fail("unknown key " + key + " in [run]", key_col);
        } else if (section == "model") {
            if (key == "g")
                cfg.g = static_cast<int>(as_long());
            else if (key == "d")
                cfg.d = static_cast<int>(as_long());
            else if (key == "t_scale_coarse")
                cfg.t_scale_coarse = as_double();
            else if (key == "t_scale_fine")
                cfg.t_scale_fine = as_double();
            else if (key.rfind("tau_", 0) == 0)
                tau_parts[key] = {as_double(), KeyPos{line_no, key_col}};
            else
                fail("unknown key " + key + " in [model]", key_col);
        } else if (section == "tolerances") {
            if (key == "tol")
                cfg.tol = as_double();
            else if (key == "tol_rel")
                cfg.tol_rel = as_double();
            else if (key == "delta_bpf")
                cfg.delta_bpf = as_double();
            else if (key == "delta_coll")
                cfg.delta_coll = as_double();
            else if (key == "eig_floor")
                cfg.eig_floor = as_double();
            else if (key == "genericity_tol")
                cfg.genericity_tol = as_double();
            else if (key == "separation_floor")
                cfg.separation_floor = as_double();
            else
                fail("unknown key " + key + " in [tolerances]", key_col);
        } else if (section == "budgets") {
            if (key == "samples")
                cfg.samples = static_cast<long>(as_long());
            else if (key == "restarts")
                cfg.restarts = static_cast<long>(as_long());
            else if (key == "iterations")
                cfg.iterations = static_cast<int>(as_long());
            else if (key == "n_rel")
                cfg.n_rel = static_cast<int>(as_long());
            else if (key == "points_per_stratum")
                cfg.points_per_stratum = static_cast<int>(as_long());
            else if (key == "g_max")
                cfg.g_max = static_cast<int>(as_long());
            else if (key == "box_radius")
                cfg.box_radius = static_cast<int>(as_long());
            else if (key == "max_radius")
                cfg.max_radius = static_cast<int>(as_long());
            else if (key == "quasi_checks")
                cfg.quasi_checks = static_cast<int>(as_long());
            else if (key == "lattice_g_max")
                cfg.lattice_g_max = static_cast<int>(as_long());
            else if (key == "lattice_entry_bound")
                cfg.lattice_entry_bound = static_cast<int>(as_long());
            else
                fail("unknown key " + key + " in [budgets]", key_col);
        }
    }

    // assemble tau_<i>_<j>_re / _im pairs
    for (const auto& [key, entry] : tau_parts) {
        int i = 0, j = 0;
        char suffix[3] = {0, 0, 0};
        char rebuilt[64] = {0};
        if (std::sscanf(key.c_str(), "tau_%d_%d_%2s", &i, &j, suffix) == 3)
            std::snprintf(rebuilt, sizeof(rebuilt), "tau_%d_%d_%s", i, j, suffix);
        if (key != rebuilt || (std::string(suffix) != "re" && std::string(suffix) != "im"))
            throw ConfigError(origin + ": malformed tau key " + key, entry.second.line,
                              entry.second.column);
        if (i < 1 || j < i || j > cfg.g)
            throw ConfigError(origin + ": tau key " + key + " out of range for g=" +
                                  std::to_string(cfg.g),
                              entry.second.line, entry.second.column);
        auto [it, inserted] = cfg.tau.try_emplace({i, j}, default_tau_entry(i, j, cfg.g));
        auto& slot = it->second;
        if (std::string(suffix) == "re")
            slot = {entry.first, slot.imag()};
        else
            slot = {slot.real(), entry.first};
    }

    validate_config(cfg);
    return cfg;
}

SuiteConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path);
}

void validate_config(const SuiteConfig& cfg) {
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0)) throw ConfigError(std::string(key) + " must be > 0 (got " + std::to_string(v) + ")");
    };
    if (cfg.g < 1) throw ConfigError("g must be >= 1");
    if (cfg.d < 1) throw ConfigError("d must be >= 1");
    if (cfg.g > 8) throw ConfigError("g must be <= 8 at desk scale");
    positive(cfg.tol, "tol");
    positive(cfg.tol_rel, "tol_rel");
    positive(cfg.delta_bpf, "delta_bpf");
    positive(cfg.delta_coll, "delta_coll");
    positive(cfg.eig_floor, "eig_floor");
    positive(cfg.genericity_tol, "genericity_tol");
    positive(cfg.separation_floor, "separation_floor");
    positive(cfg.t_scale_coarse, "t_scale_coarse");
    positive(cfg.t_scale_fine, "t_scale_fine");
    if (cfg.samples < 1) throw ConfigError("samples must be >= 1");
    if (cfg.restarts < 1) throw ConfigError("restarts must be >= 1");
    if (cfg.iterations < 1) throw ConfigError("iterations must be >= 1");
    if (cfg.n_rel < 1) throw ConfigError("n_rel must be >= 1");
    if (cfg.points_per_stratum < 1) throw ConfigError("points_per_stratum must be >= 1");
    if (cfg.g_max < 1) throw ConfigError("g_max must be >= 1");
    if (cfg.box_radius < 0) throw ConfigError("box_radius must be >= 0");
    if (cfg.max_radius < 2) throw ConfigError("max_radius must be >= 2");
    if (cfg.quasi_checks < 1) throw ConfigError("quasi_checks must be >= 1");
    if (cfg.lattice_g_max < 1 || cfg.lattice_g_max > 6)
        throw ConfigError("lattice_g_max must be in 1..6");
    if (cfg.lattice_entry_bound < 1) throw ConfigError("lattice_entry_bound must be >= 1");
    for (const auto& [idx, value] : cfg.tau) {
        if (idx.first == idx.second && !(value.imag() > 0.0))
            throw ConfigError("tau_" + std::to_string(idx.first) + "_" + std::to_string(idx.second) +
                              "_im must be positive on the diagonal");
    }
}

namespace {

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string serialize_config(const SuiteConfig& cfg) {
    std::ostringstream out;
    out << "[run]\n";
    out << "suite = " << cfg.suite << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "\n[model]\n";
    out << "g = " << cfg.g << "\n";
    out << "d = " << cfg.d << "\n";
    for (int i = 1; i <= cfg.g; ++i)
        for (int j = i; j <= cfg.g; ++j) {
            const auto v = cfg.tau_entry(i, j);
            out << "tau_" << i << "_" << j << "_re = " << format_double(v.real()) << "\n";
            out << "tau_" << i << "_" << j << "_im = " << format_double(v.imag()) << "\n";
        }
    out << "t_scale_coarse = " << format_double(cfg.t_scale_coarse) << "\n";
    out << "t_scale_fine = " << format_double(cfg.t_scale_fine) << "\n";
    out << "\n[tolerances]\n";
    out << "tol = " << format_double(cfg.tol) << "\n";
    out << "tol_rel = " << format_double(cfg.tol_rel) << "\n";
    out << "delta_bpf = " << format_double(cfg.delta_bpf) << "\n";
    out << "delta_coll = " << format_double(cfg.delta_coll) << "\n";
    out << "eig_floor = " << format_double(cfg.eig_floor) << "\n";
    out << "genericity_tol = " << format_double(cfg.genericity_tol) << "\n";
    out << "separation_floor = " << format_double(cfg.separation_floor) << "\n";
    out << "\n[budgets]\n";
    out << "samples = " << cfg.samples << "\n";
    out << "restarts = " << cfg.restarts << "\n";
    out << "iterations = " << cfg.iterations << "\n";
    out << "n_rel = " << cfg.n_rel << "\n";
    out << "points_per_stratum = " << cfg.points_per_stratum << "\n";
    out << "g_max = " << cfg.g_max << "\n";
    out << "box_radius = " << cfg.box_radius << "\n";
    out << "max_radius = " << cfg.max_radius << "\n";
    out << "quasi_checks = " << cfg.quasi_checks << "\n";
    out << "lattice_g_max = " << cfg.lattice_g_max << "\n";
    out << "lattice_entry_bound = " << cfg.lattice_entry_bound << "\n";
    return out.str();
}

degen::DegenerationModel make_model(const SuiteConfig& cfg) {
    const int slots = cfg.g - 1;
    Eigen::MatrixXcd tau_prime = Eigen::MatrixXcd::Zero(slots, slots);
    for (int i = 0; i < slots; ++i)
        for (int j = i + 1; j < slots; ++j)
            tau_prime(i, j) = tau_prime(j, i) = cfg.tau_entry(i + 1, j + 1);
    Eigen::VectorXcd tau_dprime(slots);
    for (int i = 0; i < slots; ++i) tau_dprime[i] = cfg.tau_entry(i + 1, cfg.g);
    degen::GenericityOptions gen;
    gen.n_rel = cfg.n_rel;
    gen.tol = cfg.genericity_tol;
    return degen::DegenerationModel(cfg.g, cfg.d, std::move(tau_prime), std::move(tau_dprime),
                                    cfg.tau_entry(cfg.g, cfg.g), gen);
}

theta::SiegelPoint make_siegel(const SuiteConfig& cfg) {
    Eigen::MatrixXcd tau(cfg.g, cfg.g);
    for (int i = 1; i <= cfg.g; ++i)
        for (int j = i; j <= cfg.g; ++j) tau(i - 1, j - 1) = tau(j - 1, i - 1) = cfg.tau_entry(i, j);
    return theta::SiegelPoint(tau, cfg.d);
}

theta::EvalOptions eval_options(const SuiteConfig& cfg) {
    theta::EvalOptions opt;
    opt.eig_floor = cfg.eig_floor;
    opt.max_radius = cfg.max_radius;
    return opt;
}

} // namespace ample::harness
