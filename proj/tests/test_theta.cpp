#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "ample/rng.hpp"
#include "ample/theta.hpp"

using namespace ample::theta;
using Cx = std::complex<double>;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

// Independent one-variable oracle: plain double-sided sum, no certification.
Cx oracle_sum_1d(Cx tau, Cx z, double m, int deriv = 0, int radius = 60) {
    Cx acc = 0.0;
    for (int q = -radius; q <= radius; ++q) {
        const double n = q + m;
        Cx term = std::exp(Cx(0.0, kTwoPi) * (0.5 * n * n * tau + n * z));
        if (deriv) term *= Cx(0.0, kTwoPi) * n;
        acc += term;
    }
    return acc;
}

SiegelPoint diag_siegel(std::initializer_list<Cx> diag, int d) {
    const int g = static_cast<int>(diag.size());
    Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(g, g);
    int i = 0;
    for (Cx v : diag) tau(i, i) = v, ++i;
    return SiegelPoint(tau, d);
}

} // namespace

TEST_CASE("e_of frozen values") {
    CHECK(std::abs(e_of(Cx(0, 0)) - Cx(1, 0)) < 1e-15);
    CHECK(std::abs(e_of(Cx(0.5, 0)) - Cx(-1, 0)) < 1e-15);
    CHECK(std::abs(e_of(Cx(0, 1)) - Cx(std::exp(-kTwoPi), 0)) < 1e-12);
    CHECK(e_of(Cx(0, 1)).real() == doctest::Approx(1.8674427317e-3).epsilon(1e-6));
}

TEST_CASE("SiegelPoint validation") {
    Eigen::MatrixXcd bad(2, 2);
    bad << Cx(0, 1), Cx(0.3, 0), Cx(0.1, 0), Cx(0, 1);
    CHECK_THROWS_AS(SiegelPoint(bad, 1), std::invalid_argument);

    Eigen::MatrixXcd negdef(1, 1);
    negdef << Cx(0, -1);
    CHECK_THROWS_AS(SiegelPoint(negdef, 1), std::invalid_argument);

    Eigen::MatrixXcd ok(1, 1);
    ok << Cx(0.3, 0.9);
    CHECK_THROWS_AS(SiegelPoint(ok, 0), std::invalid_argument);
    const SiegelPoint sp(ok, 2);
    CHECK(sp.imag_min_eigenvalue() == doctest::Approx(0.9));
}

TEST_CASE("theta_g at diag(i,i) equals the squared one-dimensional constant") {
    const SiegelPoint sp = diag_siegel({Cx(0, 1), Cx(0, 1)}, 1);
    const Eigen::VectorXcd z = Eigen::VectorXcd::Zero(2);
    const Eigen::VectorXd m = Eigen::VectorXd::Zero(2);
    const ThetaValue v = theta_g(sp, z, m, 1e-13);

    const Cx one_dim = oracle_sum_1d(Cx(0, 1), 0.0, 0.0);
    CHECK(std::abs(v.value - one_dim * one_dim) < 1e-12);
    CHECK(one_dim.real() == doctest::Approx(1.08643481).epsilon(1e-8));
    CHECK(v.value.real() == doctest::Approx(1.18034052).epsilon(1e-7));
    CHECK(v.tail_bound <= 1e-13);
}

TEST_CASE("theta_g evenness over random inputs") {
    Eigen::MatrixXcd tau(2, 2);
    tau << Cx(0.2, 1.0), Cx(0.1, 0.2), Cx(0.1, 0.2), Cx(-0.3, 0.8);
    const SiegelPoint sp(tau, 1);
    ample::Rng rng(411);
    for (int trial = 0; trial < 25; ++trial) {
        Eigen::VectorXcd z(2);
        for (int i = 0; i < 2; ++i) z[i] = Cx(rng.uniform(-1, 1), rng.uniform(-0.3, 0.3));
        const auto a = theta_g(sp, z, Eigen::VectorXd::Zero(2), 1e-12);
        const auto b = theta_g(sp, -z, Eigen::VectorXd::Zero(2), 1e-12);
        CHECK(std::abs(a.value - b.value) <= 2 * (a.tail_bound + b.tail_bound) + 1e-13);
    }
}

TEST_CASE("theta_g tail bound survives a larger box") {
    Eigen::MatrixXcd tau(3, 3);
    tau << Cx(0.1, 0.9), Cx(0.05, 0.1), Cx(-0.1, 0.2), Cx(0.05, 0.1), Cx(-0.2, 1.1), Cx(0.0, 0.15),
        Cx(-0.1, 0.2), Cx(0.0, 0.15), Cx(0.3, 1.3);
    const SiegelPoint sp(tau, 1);
    ample::Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXcd z(3);
        for (int i = 0; i < 3; ++i) z[i] = Cx(rng.uniform(-1, 1), rng.uniform(-0.4, 0.4));
        const auto v = theta_g(sp, z, Eigen::VectorXd::Zero(3), 1e-11);
        EvalOptions wide;
        wide.min_radius = v.radius + 2;
        const auto w = theta_g(sp, z, Eigen::VectorXd::Zero(3), 1e-11, wide);
        CHECK(std::abs(v.value - w.value) <= v.tail_bound + 1e-16);
    }
}

TEST_CASE("vartheta matches the independent oracle and its frozen value") {
    const Cx tau(0, 1);
    const ThetaValue v = vartheta(tau, Cx(0, 0), 0, 1, 1e-13);
    CHECK(std::abs(v.value - oracle_sum_1d(tau, 0.0, 0.0)) < 1e-13);
    CHECK(v.value.real() == doctest::Approx(1.08643481).epsilon(1e-8));

    ample::Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        const Cx t(rng.uniform(-0.4, 0.4), rng.uniform(0.6, 1.4));
        const Cx z(rng.uniform(-1.0, 1.0), rng.uniform(-0.4, 0.4));
        const int d = 1 + trial % 6;
        const int k = trial % d;
        for (int deriv = 0; deriv <= 1; ++deriv) {
            const auto got = vartheta(t, z, k, d, 1e-12, deriv);
            const Cx want = oracle_sum_1d(t, z, static_cast<double>(k) / d, deriv);
            CHECK(std::abs(got.value - want) < 1e-11);
        }
    }
}

TEST_CASE("vartheta quasi-periodicity in both lattice directions") {
    ample::Rng rng(2026);
    for (int trial = 0; trial < 50; ++trial) {
        const Cx tau(rng.uniform(-0.4, 0.4), rng.uniform(0.5, 1.3));
        const Cx z(rng.uniform(0.0, 1.0), rng.uniform(-0.3, 0.3));
        const int d = 1 + trial % 6;
        const int k = trial % d;
        const auto base = vartheta(tau, z, k, d, 1e-12);
        const auto s1 = vartheta(tau, z + 1.0, k, d, 1e-12);
        CHECK(std::abs(s1.value - e_of(static_cast<double>(k) / d) * base.value) < 1e-10);
        const auto s2 = vartheta(tau, z + tau, k, d, 1e-12);
        CHECK(std::abs(s2.value - e_of(-tau / 2.0 - z) * base.value) < 1e-10);
    }
}

TEST_CASE("vartheta derivative agrees with a central difference") {
    const Cx tau(0.2, 0.9);
    const Cx z(0.37, 0.11);
    const auto d1 = vartheta(tau, z, 2, 5, 1e-13, 1);
    const double h = 1e-6;
    const Cx fd = (vartheta(tau, z + h, 2, 5, 1e-13).value - vartheta(tau, z - h, 2, 5, 1e-13).value) /
                  (2 * h);
    CHECK(std::abs(d1.value - fd) < 1e-7);
}

TEST_CASE("theta_k_section: k is reduced mod d, g=1 reduces to vartheta") {
    Eigen::MatrixXcd tau(1, 1);
    tau << Cx(0.3, 1.1);
    const SiegelPoint sp(tau, 4);
    Eigen::VectorXcd z(1);
    z << Cx(0.21, 0.05);

    const auto a = theta_k_section(sp, z, 1, 1e-12);
    const auto b = theta_k_section(sp, z, 5, 1e-12);
    CHECK(a.value == b.value);
    CHECK(a.radius == b.radius);

    const auto direct = vartheta(Cx(0.3, 1.1), z[0], 1, 4, 1e-12);
    CHECK(std::abs(a.value - direct.value) < 1e-12);
}

TEST_CASE("factorization residual: one-variable case is pure roundoff") {
    Eigen::MatrixXcd tau(1, 1);
    tau << Cx(0.1, 0.8);
    const SiegelPoint sp(tau, 3);
    Eigen::VectorXcd z(1);
    z << Cx(0.4, -0.1);
    for (int k = 0; k < 3; ++k) CHECK(factorization_residual(sp, z, k, 4, 1e-12) < 1e-11);
}

TEST_CASE("factorization residual: the two-variable instance") {
    Eigen::MatrixXcd tau(2, 2);
    tau << Cx(0, 2), Cx(0.3, 0.1), Cx(0.3, 0.1), Cx(0, 1);
    const SiegelPoint sp(tau, 4);
    ample::Rng rng(5150);
    double prev = -1.0;
    for (int trial = 0; trial < 3; ++trial) {
        Eigen::VectorXcd z(2);
        z << Cx(rng.uniform(0, 1), rng.uniform(-0.2, 0.2)), Cx(rng.uniform(0, 1), rng.uniform(-0.2, 0.2));
        for (int k = 0; k < 4; ++k) CHECK(factorization_residual(sp, z, k, 6, 1e-11) < 1e-8);
        (void)prev;
    }

    // residual shrinks (within tails) as the expansion box grows
    Eigen::VectorXcd z(2);
    z << Cx(0.3, 0.05), Cx(0.6, -0.04);
    const double r1 = factorization_residual(sp, z, 0, 1, 1e-11);
    const double r6 = factorization_residual(sp, z, 0, 6, 1e-11);
    CHECK(r6 <= r1 + 1e-9);
}

TEST_CASE("automorphy ratio: integral rows give ratio 1, modular rows the common factor") {
    Eigen::MatrixXcd tau(2, 2);
    tau << Cx(0.25, 0.9), Cx(0.1, 0.15), Cx(0.1, 0.15), Cx(-0.2, 1.05);
    const SiegelPoint sp(tau, 4);
    ample::Rng rng(31);
    Eigen::VectorXcd z(2);
    z << Cx(0.3, 0.12), Cx(0.55, -0.08);

    for (int row = 3; row <= 4; ++row) {
        const auto r = automorphy_ratio(sp, z, row, 1e-12);
        CHECK(std::abs(r.ratio - Cx(1, 0)) < 1e-10);
        CHECK(r.spread < 1e-10);
    }
    // the built-in section shift cancels the tau_ii/2 factor on all but the
    // last modular row
    for (int row = 1; row <= 2; ++row) {
        const auto r = automorphy_ratio(sp, z, row, 1e-12);
        const Cx expect = row == 2 ? e_of(-tau(1, 1) / 2.0 - z[1]) : e_of(-z[0]);
        CHECK(std::abs(r.ratio - expect) < 1e-9 * std::abs(expect));
        CHECK(r.spread < 1e-9);
    }

    // one-variable case: lambda = tau gives the same factor as the series shift
    Eigen::MatrixXcd t1(1, 1);
    t1 << Cx(0.3, 1.1);
    const SiegelPoint sp1(t1, 2);
    Eigen::VectorXcd z1(1);
    z1 << Cx(0.4, 0.1);
    const auto r1 = automorphy_ratio(sp1, z1, 1, 1e-12);
    CHECK(std::abs(r1.ratio - e_of(-t1(0, 0) / 2.0 - z1[0])) < 1e-10);
    (void)rng;
}

TEST_CASE("certification failure is an error, not a silent answer") {
    Eigen::MatrixXcd tau(1, 1);
    tau << Cx(0.0, 0.02); // below the default eigenvalue floor
    const SiegelPoint sp(tau, 1);
    Eigen::VectorXcd z = Eigen::VectorXcd::Zero(1);
    CHECK_THROWS_AS(theta_g(sp, z, Eigen::VectorXd::Zero(1), 1e-12), CertificationError);

    EvalOptions tight;
    tight.max_radius = 2;
    Eigen::MatrixXcd ok(1, 1);
    ok << Cx(0.0, 0.3);
    const SiegelPoint sp2(ok, 1);
    CHECK_THROWS_AS(theta_g(sp2, z, Eigen::VectorXd::Zero(1), 1e-30, tight), CertificationError);
}
