#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ample/report.hpp"
#include "ample/suites.hpp"

using namespace ample::harness;

int main(int argc, char** argv) {
    CLI::App app{"ample: verification suites for theta linear systems and their degenerations"};
    app.require_subcommand(1);

    // verify
    std::string suite_name;
    std::string config_path;
    std::string out_path;
    std::string format = "text";
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    auto* verify = app.add_subcommand("verify", "run a verification suite and emit its report");
    verify->add_option("suite", suite_name, "suite name (see list-suites)")->required();
    verify->add_option("--config", config_path, "configuration file");
    verify->add_option("--out", out_path, "report output path (default: stdout)");
    verify->add_option("--format", format, "report format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    auto* seed_opt = verify->add_option("--seed", seed_override, "override the root seed");

    auto* list = app.add_subcommand("list-suites", "print the available suites");

    bool print_defaults = false;
    auto* defaults = app.add_subcommand("defaults", "show the built-in configuration");
    defaults->add_flag("--print", print_defaults, "print the default configuration");

    CLI11_PARSE(app, argc, argv);

    if (list->parsed()) {
        for (const auto& info : list_suites())
            std::cout << info.name << "\t" << info.description << "\n";
        return 0;
    }
    if (defaults->parsed()) {
        (void)print_defaults;
        std::cout << serialize_config(SuiteConfig{});
        return 0;
    }

    seed_given = seed_opt->count() > 0;
    try {
        SuiteConfig cfg = config_path.empty() ? SuiteConfig{} : load_config(config_path);
        cfg.suite = suite_name;
        if (seed_given) cfg.seed = seed_override;
        validate_config(cfg);

        const DiagnosticsReport report = run_suite(cfg);
        if (!out_path.empty()) {
            emit_report(report, format, out_path);
            std::cout << report.to_text();
        } else {
            emit_report(report, format, "");
        }
        return exit_code(report);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
