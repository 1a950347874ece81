#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ample/config.hpp"
#include "ample/report.hpp"
#include "ample/suites.hpp"

using namespace ample::harness;

TEST_CASE("config: minimal file parses with defaults filled") {
    const auto cfg = parse_config("[run]\nsuite = divisibility\n[model]\ng = 3\n");
    CHECK(cfg.suite == "divisibility");
    CHECK(cfg.g == 3);
    CHECK(cfg.d == 5);
    CHECK(cfg.tol == 1e-12);
    CHECK(cfg.tau_entry(3, 3) == std::complex<double>(0.4, 1.1));
    CHECK(cfg.tau_entry(1, 3) == std::complex<double>(2.21, 0.38));
}

TEST_CASE("config: invalid values are rejected with the key named") {
    CHECK_THROWS_WITH_AS(parse_config("[tolerances]\ndelta_coll = -1\n"),
                         doctest::Contains("delta_coll"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[run]\nbogus = 3\n"), doctest::Contains("bogus"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[model]\ntau_9_9_re = 1\n"), doctest::Contains("tau_9_9"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config("[nope]\nx = 1\n"), doctest::Contains("unknown section"),
                         ConfigError);
    CHECK_THROWS_AS(parse_config("[run]\nsuite = a\nsuite = b\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("stray = 1\n"), ConfigError);

    // line/column context is carried
    try {
        parse_config("[run]\n\nbogus = 3\n");
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(e.line == 3);
        CHECK(e.column >= 1);
    }
}

TEST_CASE("config: serialize / parse round trip") {
    SuiteConfig cfg;
    cfg.suite = "immersion";
    cfg.g = 3;
    cfg.d = 9;
    cfg.seed = 12345;
    cfg.tau[{1, 2}] = {0.31, 0.27};
    cfg.samples = 123;
    const std::string text = serialize_config(cfg);
    const SuiteConfig back = parse_config(text);
    CHECK(back.suite == cfg.suite);
    CHECK(back.g == cfg.g);
    CHECK(back.d == cfg.d);
    CHECK(back.seed == cfg.seed);
    CHECK(back.samples == cfg.samples);
    for (int i = 1; i <= 3; ++i)
        for (int j = i; j <= 3; ++j) CHECK(back.tau_entry(i, j) == cfg.tau_entry(i, j));
    // a second round trip is exact
    CHECK(serialize_config(back) == text);
}

TEST_CASE("report: empty report serializes with version and overall pass") {
    DiagnosticsReport rep;
    rep.suite = "divisibility";
    const auto j = rep.to_json();
    CHECK(j["version"] == 1);
    CHECK(j["checks"].is_array());
    CHECK(j["checks"].empty());
    CHECK(j["overall"] == "PASS");
    CHECK(exit_code(rep) == 0);
}

TEST_CASE("report: failed checks flip the exit code and the canonical form drops timing") {
    DiagnosticsReport rep;
    rep.suite = "x";
    CheckResult c;
    c.name = "c";
    c.claim = "claim";
    c.verdict = Verdict::Fail;
    c.residuals.push_back({"m", 2.0, 1.0, "<"});
    rep.checks.push_back(c);
    rep.wall_time_s = 1.25;
    CHECK(exit_code(rep) == 1);
    CHECK(rep.to_json(true).contains("wall_time_s"));
    CHECK_FALSE(rep.to_json(false).contains("wall_time_s"));
    CHECK(rep.to_json(false)["checks"][0]["paper_ref"] == "claim");
}

TEST_CASE("run_suite: divisibility is deterministic and correct") {
    SuiteConfig cfg;
    cfg.suite = "divisibility";
    cfg.g_max = 6;
    const auto rep1 = run_suite(cfg);
    CHECK(rep1.overall() == Verdict::Pass);
    const auto pairs = rep1.checks.front().witnesses[0]["qualifying_pairs"];
    CHECK(pairs.size() == 4);
    const auto rep2 = run_suite(cfg);
    CHECK(rep1.to_json(false).dump() == rep2.to_json(false).dump());
}

TEST_CASE("run_suite: unknown suite is a configuration error") {
    SuiteConfig cfg;
    cfg.suite = "star";
    CHECK_THROWS_AS(run_suite(cfg), ConfigError);
}

TEST_CASE("run_suite: lattice-exact at reduced bounds") {
    SuiteConfig cfg;
    cfg.suite = "lattice-exact";
    cfg.lattice_g_max = 3;
    cfg.lattice_entry_bound = 2;
    const auto rep = run_suite(cfg);
    CHECK(rep.overall() == Verdict::Pass);
    for (const auto& c : rep.checks) CHECK(c.verdict != Verdict::Fail);
}

TEST_CASE("run_suite: gluing suite passes on the default model") {
    SuiteConfig cfg;
    cfg.suite = "gluing";
    cfg.g = 2;
    cfg.d = 5;
    cfg.samples = 40;
    const auto rep = run_suite(cfg);
    CHECK(rep.overall() == Verdict::Pass);
}

TEST_CASE("suite list covers the dispatch table") {
    const auto& suites = list_suites();
    CHECK(suites.size() == 12);
    bool has_full = false;
    for (const auto& s : suites) has_full |= (s.name == "full");
    CHECK(has_full);
}
