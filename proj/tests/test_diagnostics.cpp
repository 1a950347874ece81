#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ample/diagnostics.hpp"
#include "ample/rng.hpp"

using namespace ample::diag;
using ample::degen::DegenerationModel;
using Cx = std::complex<double>;

namespace {

DegenerationModel model_g2(int d = 5) {
    Eigen::MatrixXcd prime = Eigen::MatrixXcd::Zero(1, 1);
    Eigen::VectorXcd mixed(1);
    mixed << Cx(2.21, 0.38);
    return DegenerationModel(2, d, prime, mixed, Cx(0.4, 1.1));
}

DegenerationModel model_g3(int d = 9) {
    Eigen::MatrixXcd prime = Eigen::MatrixXcd::Zero(2, 2);
    prime(0, 1) = prime(1, 0) = Cx(0.31, 0.27);
    Eigen::VectorXcd mixed(2);
    mixed << Cx(2.21, 0.38), Cx(4.13, 0.59);
    return DegenerationModel(3, d, prime, mixed, Cx(0.4, 1.1));
}

Eigen::MatrixXcd random_matrix(int rows, int cols, ample::Rng& rng) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Cx(rng.gaussian(), rng.gaussian());
    return m;
}

} // namespace

TEST_CASE("numerical rank: frozen cases") {
    CHECK(numerical_rank(Eigen::MatrixXcd::Zero(3, 4), 1e-8).rank == 0);
    CHECK(numerical_rank(Eigen::MatrixXcd::Identity(4, 4), 1e-8).rank == 4);

    ample::Rng rng(17);
    Eigen::MatrixXcd m = random_matrix(3, 5, rng);
    m.row(1) = m.row(0);
    CHECK(numerical_rank(m, 1e-8).rank == 2);

    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(2, 2);
    bad(0, 0) = Cx(std::numeric_limits<double>::infinity(), 0.0);
    CHECK_THROWS_AS(numerical_rank(bad, 1e-8), std::invalid_argument);
}

TEST_CASE("numerical rank: monotone under appended rows, invariant under row scaling") {
    ample::Rng rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const int rows = 2 + static_cast<int>(rng.next_u64() % 4);
        const int cols = 3 + static_cast<int>(rng.next_u64() % 4);
        Eigen::MatrixXcd m = random_matrix(rows, cols, rng);
        const int base = numerical_rank(m, 1e-8).rank;

        Eigen::MatrixXcd extended(rows + 1, cols);
        extended.topRows(rows) = m;
        extended.row(rows) = random_matrix(1, cols, rng);
        CHECK(numerical_rank(extended, 1e-8).rank >= base);

        Eigen::MatrixXcd scaled = m;
        scaled.row(0) *= Cx(0.0, 3.7);
        CHECK(numerical_rank(scaled, 1e-8).rank == base);
    }
}

TEST_CASE("fs distance: basic geometry") {
    Eigen::VectorXcd u(2), v(2);
    u << 1, 0;
    v << 0, 1;
    CHECK(fs_distance(u, v) == doctest::Approx(1.0));
    CHECK(fs_distance(u, u) == doctest::Approx(0.0));
    v << Cx(0, 2), 0; // same projective point
    CHECK(fs_distance(u, v) == doctest::Approx(0.0));
}

TEST_CASE("elliptic independence: frozen and randomized") {
    const auto m5 = model_g2(5);
    std::vector<Cx> single{Cx(0.3, 0.2)};
    CHECK(elliptic_independence_check(m5, single, 1e-8, 1e-3, 1e-12).rank == 1);

    std::vector<Cx> four{Cx(0.0, 0.0), Cx(0.7, 0.0), Cx(1.9, 0.0), Cx(3.1, 0.0)};
    const auto verdict = elliptic_independence_check(m5, four, 1e-8, 1e-3, 1e-12);
    CHECK(verdict.rank == 4);

    // d-1 stratified-jittered points stay independent with healthy margin
    const auto m9 = model_g2(9);
    ample::Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Cx> pts;
        for (int j = 0; j < 8; ++j)
            pts.push_back((j + rng.uniform(0.1, 0.9)) * 9.0 / 8.0 +
                          rng.uniform(0, 1) * Cx(0.4, 1.1));
        const auto v = elliptic_independence_check(m9, pts, 1e-8, 0.01, 1e-12);
        CHECK(v.rank == 8);
        CHECK(v.retained_ratio() > 1e-7);
    }

    std::vector<Cx> clash{Cx(0.3, 0.2), Cx(0.3, 0.2)};
    CHECK_THROWS_AS(elliptic_independence_check(m5, clash, 1e-8, 1e-3, 1e-12),
                    std::invalid_argument);
}

TEST_CASE("base locus: single-section model has zeros, ample models do not") {
    Eigen::MatrixXcd prime0(0, 0);
    Eigen::VectorXcd mixed0(0);
    const DegenerationModel m1(1, 1, prime0, mixed0, Cx(0.4, 1.1));
    const auto res1 = base_locus_search(m1, 60, 150, 7, 1e-12);
    CHECK(res1.min_residual < 1e-5); // the one section vanishes somewhere

    const auto res2 = base_locus_search(model_g2(3), 80, 120, 7, 1e-12);
    CHECK(res2.min_residual > 1e-6);
    CHECK(res2.argmin.has_value());
}

TEST_CASE("product construction: common zero iff d <= g") {
    const std::vector<Cx> taus2{Cx(0.30, 1.10), Cx(-0.20, 0.90)};
    const auto found = product_construction_check(2, 2, taus2, 400, 260, 11, 1e-8, 1e-12);
    CHECK(found.common_zero_found);
    CHECK(found.min_residual < 1e-8);

    const auto none = product_construction_check(2, 3, taus2, 250, 120, 11, 1e-8, 1e-12);
    CHECK_FALSE(none.common_zero_found);
    CHECK(none.min_residual > 1e-6);
}

TEST_CASE("divisibility scan matches the expected set") {
    const auto pairs = degree_divisibility_scan(6);
    const std::vector<std::pair<int, int>> expect{{1, 2}, {1, 3}, {2, 4}, {2, 5}};
    CHECK(pairs == expect);

    // oracle: direct factorial / binomial comparison
    auto fact = [](int n) {
        long long f = 1;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    auto binom = [](int n, int k) {
        long long b = 1;
        for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
        return b;
    };
    std::vector<std::pair<int, int>> oracle;
    for (int g = 1; g <= 10; ++g)
        for (int d = g + 1; d <= 2 * g + 1; ++d)
            if (binom(d, g + 1) % fact(g) == 0) oracle.emplace_back(g, d);
    CHECK(degree_divisibility_scan(10) == oracle);
}

TEST_CASE("immersion check: rank tables at (2,5) and (3,9)") {
    const auto rep2 = immersion_check(model_g2(5), 4, 1e-8, 3, 1e-12);
    REQUIRE(rep2.table.size() == 2);
    CHECK(rep2.table[0].min_rank == 3);
    CHECK(rep2.table[1].min_rank == 4);
    CHECK(rep2.all_expected);

    const auto rep3 = immersion_check(model_g3(9), 2, 1e-8, 3, 1e-12);
    REQUIRE(rep3.table.size() == 3);
    CHECK(rep3.table[0].min_rank == 4);
    CHECK(rep3.table[1].min_rank == 5);
    CHECK(rep3.table[2].min_rank == 6);
    CHECK(rep3.all_expected);
}

TEST_CASE("injectivity search: small budget smoke run stays empty at (2,5)") {
    InjectivityOptions opt;
    opt.restarts = 60;
    opt.iterations = 60;
    opt.structured = false;
    const auto res = injectivity_search(model_g2(5), opt, 99);
    CHECK(res.witnesses.empty());
    CHECK(res.stats.restarts == 60);
    CHECK(res.stats.best_fs > 1e-8);

    CHECK_THROWS_AS(injectivity_search(model_g2(2), opt, 99), std::invalid_argument);
}
