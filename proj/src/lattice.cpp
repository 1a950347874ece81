#include "ample/lattice.hpp"

#include <algorithm>
#include <cstdlib>

namespace ample::lattice {

std::vector<StarVector> enumerate_star(int g) {
    if (g < 1) throw std::invalid_argument("enumerate_star: g must be >= 1");
    std::vector<StarVector> out;
    out.reserve((std::size_t{2} << g) - 1);
    std::vector<int> v(static_cast<std::size_t>(g), 0);
    for (unsigned mask = 0; mask < (1u << g); ++mask) {
        for (int i = 0; i < g; ++i) v[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? 1 : 0;
        out.emplace_back(v);
    }
    for (unsigned mask = 1; mask < (1u << g); ++mask) {
        for (int i = 0; i < g; ++i) v[static_cast<std::size_t>(i)] = (mask >> i) & 1u ? -1 : 0;
        out.emplace_back(v);
    }
    return out;
}

static void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b || a == 0) throw std::invalid_argument(std::string(what) + ": length mismatch");
}

void pairing_exponents_into(std::span<const int> y, std::span<const int> z, MonomialExponents& out) {
    require_same_length(y.size(), z.size(), "pairing_exponents");
    const int g = static_cast<int>(y.size());
    if (out.g() != g) out = MonomialExponents(g);
    for (int i = 0; i < g; ++i) {
        out.set_w(i, 0);
        for (int j = i; j < g; ++j) {
            const long long yi = y[static_cast<std::size_t>(i)], yj = y[static_cast<std::size_t>(j)];
            const long long zi = z[static_cast<std::size_t>(i)], zj = z[static_cast<std::size_t>(j)];
            out.set_t(i, j, i == j ? checked_mul(yi, zi) : checked_mul(yi - yj, zi - zj));
        }
    }
}

MonomialExponents pairing_exponents(std::span<const int> y, std::span<const int> z) {
    require_same_length(y.size(), z.size(), "pairing_exponents");
    MonomialExponents out(static_cast<int>(y.size()));
    pairing_exponents_into(y, z, out);
    return out;
}

void shifted_self_pairing_into(std::span<const int> y, const StarVector& alpha, MonomialExponents& out) {
    require_same_length(y.size(), static_cast<std::size_t>(alpha.size()), "shifted_self_pairing");
    const int g = static_cast<int>(y.size());
    if (out.g() != g) out = MonomialExponents(g);
    for (int i = 0; i < g; ++i) {
        out.set_w(i, 0);
        const long long yi = y[static_cast<std::size_t>(i)];
        out.set_t(i, i, checked_mul(yi, yi + alpha[i]));
        for (int j = i + 1; j < g; ++j) {
            const long long dy = yi - y[static_cast<std::size_t>(j)];
            out.set_t(i, j, checked_mul(dy, dy + alpha[i] - alpha[j]));
        }
    }
}

MonomialExponents shifted_self_pairing(std::span<const int> y, const StarVector& alpha) {
    MonomialExponents out(static_cast<int>(y.size()));
    shifted_self_pairing_into(y, alpha, out);
    return out;
}

void chart_monomial_into(const StarVector& alpha, const StarVector& beta, std::span<const int> z,
                         bool restricted, MonomialExponents& out) {
    const int g = alpha.size();
    if (beta.size() != g || static_cast<int>(z.size()) != g)
        throw std::invalid_argument("chart_monomial: length mismatch");
    if (out.g() != g) out = MonomialExponents(g);
    out.clear();
    for (int i = 0; i < g; ++i) {
        const long long zi = z[static_cast<std::size_t>(i)];
        out.set_t(i, i, checked_mul(zi, zi + beta[i]));
        out.set_w(i, 2 * zi + beta[i] - alpha[i]);
        if (!restricted) {
            for (int j = i + 1; j < g; ++j) {
                const long long dz = zi - z[static_cast<std::size_t>(j)];
                out.set_t(i, j, checked_mul(dz, dz + beta[i] - beta[j]));
            }
        }
    }
}

MonomialExponents chart_monomial(const StarVector& alpha, const StarVector& beta,
                                 std::span<const int> z, bool restricted) {
    MonomialExponents out(alpha.size());
    chart_monomial_into(alpha, beta, z, restricted, out);
    return out;
}

std::vector<ChartTriple> express_in_chart(const StarVector& alpha, const MonomialExponents& m) {
    const int g = alpha.size();
    if (m.g() != g) throw std::invalid_argument("express_in_chart: dimension mismatch");
    for (int i = 0; i < g; ++i)
        for (int j = i + 1; j < g; ++j)
            if (m.t(i, j) != 0)
                throw std::invalid_argument("express_in_chart: expected a restricted monomial");

    const bool nonneg = alpha.nonnegative();
    std::vector<ChartTriple> out(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        const long long ti = m.t(i, i);
        const long long wi = m.w(i);
        ChartTriple tr;
        if (nonneg) {
            // X_i = T_i^{alpha_i} w_i, Y_i = w_i^{-1}
            tr.a = std::max(wi, 0LL);
            tr.b = std::max(-wi, 0LL);
            tr.c = ti - tr.a * alpha[i];
        } else {
            // X_i = w_i, Y_i = T_i^{-alpha_i} w_i^{-1}
            tr.a = std::max(wi, 0LL);
            tr.b = std::max(-wi, 0LL);
            tr.c = ti - tr.b * (-alpha[i]);
        }
        if (tr.c < 0 || ti < 0)
            throw ChartMembershipError("express_in_chart: monomial is not in the chart ring");
        out[static_cast<std::size_t>(i)] = tr;
    }
    return out;
}

IntMatrix IntMatrix::identity(int n) {
    IntMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::multiply(const IntMatrix& rhs) const {
    if (cols != rhs.rows) throw std::invalid_argument("IntMatrix: shape mismatch");
    IntMatrix out(rows, rhs.cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) {
            const long long v = at(i, k);
            if (v == 0) continue;
            for (int j = 0; j < rhs.cols; ++j)
                out.at(i, j) = checked_add(out.at(i, j), checked_mul(v, rhs.at(k, j)));
        }
    return out;
}

IntMatrix IntMatrix::transpose() const {
    IntMatrix out(cols, rows);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) out.at(j, i) = at(i, j);
    return out;
}

bool IntMatrix::is_identity() const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (at(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

ToroidalChange toroidal_exponent_matrix(int g) {
    if (g < 1) throw std::invalid_argument("toroidal_exponent_matrix: g must be >= 1");
    const MonomialExponents layout(g);
    const int n = g * (g + 1) / 2;

    IntMatrix m(n, n);
    IntMatrix c(n, n);
    for (int i = 0; i < g; ++i) {
        const int diag = static_cast<int>(layout.pair_index(i, i));
        // log T_ii = sum_k log t_{ki}
        for (int k = 0; k < g; ++k) m.at(diag, static_cast<int>(layout.pair_index(k, i))) += 1;
        c.at(diag, diag) = 1;
        for (int j = i + 1; j < g; ++j) {
            const int off = static_cast<int>(layout.pair_index(i, j));
            // log T_ij = -log t_ij
            m.at(off, off) = -1;
            // primed basis element: n'_ij = n_ii + n_jj - n_ij
            c.at(off, static_cast<int>(layout.pair_index(i, i))) = 1;
            c.at(off, static_cast<int>(layout.pair_index(j, j))) = 1;
            c.at(off, off) = -1;
        }
    }

    // Dual-basis relation: transpose(C) must invert the exponent matrix.
    if (!c.transpose().multiply(m).is_identity())
        throw std::logic_error("toroidal_exponent_matrix: dual-basis relation violated");

    return ToroidalChange{std::move(m), std::move(c)};
}

namespace {

// Exact determinant by Bareiss fraction-free elimination.
long long determinant(IntMatrix m) {
    const int n = m.rows;
    if (n != m.cols) throw std::invalid_argument("determinant: square matrix required");
    long long prev = 1;
    int sign = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (m.at(k, k) == 0) {
            int swap_row = -1;
            for (int r = k + 1; r < n; ++r)
                if (m.at(r, k) != 0) {
                    swap_row = r;
                    break;
                }
            if (swap_row < 0) return 0;
            for (int j = 0; j < n; ++j) std::swap(m.at(k, j), m.at(swap_row, j));
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                const long long num =
                    checked_add(checked_mul(m.at(i, j), m.at(k, k)), -checked_mul(m.at(i, k), m.at(k, j)));
                m.at(i, j) = num / prev; // exact by Bareiss
            }
        prev = m.at(k, k);
    }
    return sign * m.at(n - 1, n - 1);
}

} // namespace

PeriodLattice period_lattice(int g, int d) {
    if (g < 1) throw std::invalid_argument("period_lattice: g must be >= 1");
    if (d < 1) throw std::invalid_argument("period_lattice: d must be >= 1");

    PeriodLattice lattice;
    lattice.g = g;
    lattice.d = d;
    lattice.generators.reserve(static_cast<std::size_t>(g));
    for (int i = 0; i < g; ++i) {
        MonomialExponents gen(g);
        const long long scale = (i == g - 1) ? d : 1;
        for (int k = 0; k < g; ++k) gen.set_t(k, i, scale);
        lattice.generators.push_back(std::move(gen));
    }

    // Coefficients of the generators on the principal basis: solve exactly and
    // verify consistency, then take the determinant.
    IntMatrix coeff(g, g);
    for (int i = 0; i < g; ++i) {
        const auto& gen = lattice.generators[static_cast<std::size_t>(i)];
        for (int j = 0; j < g; ++j) coeff.at(i, j) = gen.t(j, j);
        for (int a = 0; a < g; ++a)
            for (int b = a + 1; b < g; ++b)
                if (gen.t(a, b) != coeff.at(i, a) + coeff.at(i, b))
                    throw std::logic_error("period_lattice: generator not in the principal lattice");
    }
    lattice.index_in_principal = std::llabs(determinant(coeff));
    return lattice;
}

std::vector<long long> generator_coordinate_T_exponents(const PeriodLattice& lattice, int gen, int coord) {
    const int g = lattice.g;
    if (gen < 0 || gen >= g || coord < 0 || coord >= g)
        throw std::out_of_range("generator_coordinate_T_exponents: index out of range");
    const MonomialExponents layout(g);
    std::vector<long long> out(static_cast<std::size_t>(g) * (g + 1) / 2, 0);
    const long long scale = (gen == g - 1) ? lattice.d : 1;
    if (coord == gen) {
        for (int k = 0; k < g; ++k) out[layout.pair_index(k, gen)] += scale;
    } else {
        out[layout.pair_index(coord, gen)] = -scale;
    }
    return out;
}

} // namespace ample::lattice
