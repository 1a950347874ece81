#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ample/exponents.hpp"

namespace ample::lattice {

/// Raised by express_in_chart when the exponent data cannot be rewritten over
/// the nonnegative chart generators.
class ChartMembershipError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All sign vectors in {0,+1,-1}^g with entries all >= 0 or all <= 0.
/// Order: the zero vector, nonnegative vectors by increasing support mask,
/// then nonpositive ones. Size is 2^(g+1) - 1.
std::vector<StarVector> enumerate_star(int g);

/// Exponents of the pairing character evaluated on a pair of lattice points:
/// t(i,i) = y_i z_i and t(i,j) = (y_i - y_j)(z_i - z_j) for i < j.
MonomialExponents pairing_exponents(std::span<const int> y, std::span<const int> z);
void pairing_exponents_into(std::span<const int> y, std::span<const int> z, MonomialExponents& out);

/// Exponents of the alpha-shifted self pairing:
/// t(i,i) = y_i(y_i + alpha_i), t(i,j) = (y_i - y_j)(y_i - y_j + alpha_i - alpha_j).
/// All returned exponents are nonnegative.
MonomialExponents shifted_self_pairing(std::span<const int> y, const StarVector& alpha);
void shifted_self_pairing_into(std::span<const int> y, const StarVector& alpha, MonomialExponents& out);

/// Chart generator monomial M_{beta,z} of the alpha-chart.
/// Restricted form keeps only the diagonal T_i = T_ii variables:
///   T_i exponent z_i(z_i + beta_i), w_i exponent 2 z_i + beta_i - alpha_i.
/// The unrestricted form additionally carries the off-diagonal exponents
/// (z_i - z_j)(z_i - z_j + beta_i - beta_j).
MonomialExponents chart_monomial(const StarVector& alpha, const StarVector& beta,
                                 std::span<const int> z, bool restricted);
void chart_monomial_into(const StarVector& alpha, const StarVector& beta, std::span<const int> z,
                         bool restricted, MonomialExponents& out);

struct ChartTriple {
    long long a = 0; // exponent of X_i
    long long b = 0; // exponent of Y_i
    long long c = 0; // exponent of T_i
    bool operator==(const ChartTriple&) const = default;
};

/// Rewrites a restricted chart monomial over the chart generators
/// X_i, Y_i, T_i with nonnegative exponents. For alpha >= 0 the generators are
/// X_i = T_i^{alpha_i} w_i, Y_i = w_i^{-1}; for alpha <= 0 they are
/// X_i = w_i, Y_i = T_i^{-alpha_i} w_i^{-1}. Throws ChartMembershipError when
/// no nonnegative rewriting exists.
std::vector<ChartTriple> express_in_chart(const StarVector& alpha, const MonomialExponents& m);

/// Dense exact integer matrix, just large enough for the toroidal maps.
struct IntMatrix {
    int rows = 0, cols = 0;
    std::vector<long long> a;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0) {}
    long long& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    long long at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
    static IntMatrix identity(int n);
    IntMatrix multiply(const IntMatrix& rhs) const;
    IntMatrix transpose() const;
    bool is_identity() const;
    bool operator==(const IntMatrix&) const = default;
};

struct ToroidalChange {
    IntMatrix exponent_matrix; // log T in terms of log t on Z^{g(g+1)/2}
    IntMatrix basis_change;    // primed basis in terms of the standard one
};

/// Exact coordinate-change matrix between the two monomial coordinate systems
/// on the symmetric torus, together with the basis change that defines the
/// principal cone. Construction verifies that the transposed basis change
/// inverts the exponent matrix; the map itself is an involution.
ToroidalChange toroidal_exponent_matrix(int g);

struct PeriodLattice {
    int g = 0;
    int d = 1;
    std::vector<MonomialExponents> generators; // column-indicator exponents in the t-variables
    long long index_in_principal = 1;
};

/// Period lattice generators r_1,...,r_{g-1} and r_g (or its d-th power).
/// Generator i carries t-exponent 1 on every pair involving i; the last one is
/// scaled by d. The index of the lattice in the principal one equals d.
PeriodLattice period_lattice(int g, int d);

/// The T-variable exponent vector of coordinate `coord` of generator `gen`,
/// laid out in the shared pair indexing: T_{coord,gen}^{-1} off the diagonal
/// and the full column product on it.
std::vector<long long> generator_coordinate_T_exponents(const PeriodLattice& lattice, int gen, int coord);

} // namespace ample::lattice
