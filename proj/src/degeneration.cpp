#include "ample/degeneration.hpp"

#include <algorithm>
#include <cmath>

#include "ample/rng.hpp"

namespace ample::degen {

using theta::e_of;

DegenerationModel::DegenerationModel(int g, int d, Eigen::MatrixXcd tau_prime,
                                     Eigen::VectorXcd tau_dprime, Complex tau_g,
                                     const GenericityOptions& gen)
    : g_(g), d_(d), tau_prime_(std::move(tau_prime)), tau_dprime_(std::move(tau_dprime)), tau_g_(tau_g) {
    if (g_ < 1) throw std::invalid_argument("DegenerationModel: g must be >= 1");
    if (d_ < 1) throw std::invalid_argument("DegenerationModel: d must be >= 1");
    if (!(tau_g_.imag() > 0.0)) throw std::invalid_argument("DegenerationModel: Im(tau_g) must be positive");
    const int slots = g_ - 1;
    if (tau_prime_.rows() != slots || tau_prime_.cols() != slots || tau_dprime_.size() != slots)
        throw std::invalid_argument("DegenerationModel: parameter shapes do not match g");
    for (int i = 0; i < slots; ++i) {
        if (tau_prime_(i, i) != Complex{})
            throw std::invalid_argument("DegenerationModel: tau' diagonal must be zero");
        for (int j = i + 1; j < slots; ++j)
            if (tau_prime_(i, j) != tau_prime_(j, i))
                throw std::invalid_argument("DegenerationModel: tau' must be symmetric");
    }
    certify_genericity(gen);
}

Complex DegenerationModel::tau_prime(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= g_ - 1 || j >= g_ - 1)
        throw std::out_of_range("DegenerationModel: tau' index out of range");
    return tau_prime_(i, j);
}

Complex DegenerationModel::reduce_mod_lattice(Complex z, long* units_d, long* units_tau) const {
    long md = 0, mt = 0;
    for (int guard = 0; guard < 4; ++guard) {
        const double beta = z.imag() / tau_g_.imag();
        const long nb = static_cast<long>(std::floor(beta));
        z -= static_cast<double>(nb) * tau_g_;
        mt += nb;
        const double alpha = z.real() / d_;
        const long na = static_cast<long>(std::floor(alpha));
        z -= static_cast<double>(na) * static_cast<double>(d_);
        md += na;
        if (z.imag() >= 0.0 && z.imag() < tau_g_.imag() && z.real() >= 0.0 && z.real() < d_) break;
    }
    if (units_d) *units_d = md;
    if (units_tau) *units_tau = mt;
    return z;
}

double DegenerationModel::curve_distance(Complex a, Complex b) const {
    const Complex diff = reduce_mod_lattice(a - b);
    double best = std::abs(diff);
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            best = std::min(best, std::abs(diff - static_cast<double>(i * d_) -
                                           static_cast<double>(j) * tau_g_));
    return best;
}

void DegenerationModel::certify_genericity(const GenericityOptions& gen) const {
    const int slots = g_ - 1;
    if (slots == 0) return;
    std::vector<int> n(static_cast<std::size_t>(slots), -gen.n_rel);
    for (;;) {
        bool all_zero = true;
        for (int v : n) all_zero &= (v == 0);
        if (!all_zero) {
            Complex combo = 0.0;
            for (int i = 0; i < slots; ++i)
                combo += static_cast<double>(n[static_cast<std::size_t>(i)]) * tau_dprime_[i];
            if (curve_distance(combo, Complex{}) < gen.tol)
                throw GenericityError("DegenerationModel: integer relation among translation points");
        }
        int carry = 0;
        while (carry < slots && ++n[static_cast<std::size_t>(carry)] > gen.n_rel) {
            n[static_cast<std::size_t>(carry)] = -gen.n_rel;
            ++carry;
        }
        if (carry == slots) break;
    }
}

int ApPoint::count_stratum(const std::vector<HomogCoord>& coords) {
    int h = 0;
    for (const auto& c : coords) h += (c.at_zero() || c.at_infinity()) ? 1 : 0;
    return h;
}

ApPoint::ApPoint(Complex z, std::vector<HomogCoord> coords) : z_(z), coords_(std::move(coords)) {
    for (const auto& c : coords_)
        if (c.at_zero() && c.at_infinity())
            throw std::invalid_argument("ApPoint: coordinate pair (0:0) is not a point");
    stratum_ = count_stratum(coords_);
}

ApPoint ApPoint::normalized_scale() const {
    std::vector<HomogCoord> scaled = coords_;
    for (auto& c : scaled) {
        const double m = std::max(std::abs(c.u), std::abs(c.v));
        c.u /= m;
        c.v /= m;
    }
    return ApPoint(z_, std::move(scaled));
}

Complex c_coefficient(std::span<const int> q, const DegenerationModel& model) {
    const int slots = model.g() - 1;
    if (static_cast<int>(q.size()) != slots)
        throw std::invalid_argument("c_coefficient: q must have g-1 entries");
    Complex phase = 0.0;
    for (int i = 0; i < slots; ++i) {
        const int qi = q[static_cast<std::size_t>(i)];
        if (qi != 0 && qi != 1) throw std::invalid_argument("c_coefficient: q must lie in {0,1}^{g-1}");
        if (qi == 0) continue;
        for (int j = i + 1; j < slots; ++j)
            if (q[static_cast<std::size_t>(j)] == 1) phase += model.tau_prime(i, j);
    }
    return e_of(phase);
}

namespace {

// Multilinear section sum over masks q contained in `support`, optionally
// restricted to masks containing `required`. Column k of the result gets
// sum_q c_q vartheta_k^{(deriv)}(z + shift + q.tau'') weight(q) mono(q).
struct SumSpec {
    Complex shift{0.0, 0.0};
    int deriv = 0;
    unsigned required = 0u;   // masks must contain these bits
    Complex extra_phase_per_bit[32] = {}; // multiplies e(phase_i) per set bit i
};

Eigen::RowVectorXcd masked_section_sum(const DegenerationModel& model, Complex z,
                                       const std::vector<Complex>& bit_factor, unsigned support,
                                       const SumSpec& spec, double tol,
                                       const theta::EvalOptions& opt, double* err) {
    const int slots = model.g() - 1;
    const int d = model.d();
    Eigen::RowVectorXcd out = Eigen::RowVectorXcd::Zero(d);
    double err_acc = 0.0;
    for (unsigned q = 0; q < (1u << slots); ++q) {
        if ((q & support) != q) continue;
        if ((q & spec.required) != spec.required) continue;
        Complex arg = z + spec.shift;
        Complex phase = 0.0;
        Complex mono = 1.0;
        for (int i = 0; i < slots; ++i) {
            if (!((q >> i) & 1u)) continue;
            arg += model.tau_dprime(i);
            phase += spec.extra_phase_per_bit[i];
            mono *= bit_factor[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < slots; ++j)
                if ((q >> j) & 1u) phase += model.tau_prime(i, j);
        }
        const Complex coeff = e_of(phase) * mono;
        if (coeff == Complex{}) continue;
        double tail_max = 0.0;
        for (int k = 0; k < d; ++k) {
            const theta::ThetaValue tv = theta::vartheta(model.tau_g(), arg, k, d, tol, spec.deriv, opt);
            out[k] += coeff * tv.value;
            tail_max = std::max(tail_max, tv.tail_bound);
        }
        err_acc += std::abs(coeff) * tail_max;
    }
    if (err) *err = err_acc;
    return out;
}

} // namespace

PhiValue phi_sections(const DegenerationModel& model, const ApPoint& p, double tol,
                      const theta::EvalOptions& opt) {
    const int slots = model.g() - 1;
    if (p.slots() != slots) throw std::invalid_argument("phi_sections: point has wrong number of slots");
    const ApPoint q = p.normalized_scale();

    const int d = model.d();
    PhiValue out;
    out.values = Eigen::VectorXcd::Zero(d);
    double err = 0.0;
    double scale = 0.0;
    for (unsigned mask = 0; mask < (1u << slots); ++mask) {
        Complex arg = q.z();
        Complex phase = 0.0;
        Complex mono = 1.0;
        for (int i = 0; i < slots; ++i) {
            const auto& c = q.coords()[static_cast<std::size_t>(i)];
            if ((mask >> i) & 1u) {
                arg += model.tau_dprime(i);
                mono *= c.u;
                for (int j = i + 1; j < slots; ++j)
                    if ((mask >> j) & 1u) phase += model.tau_prime(i, j);
            } else {
                mono *= c.v;
            }
        }
        const Complex coeff = e_of(phase) * mono;
        double tail_max = 0.0;
        for (int k = 0; k < d; ++k) {
            const theta::ThetaValue tv = theta::vartheta(model.tau_g(), arg, k, d, tol, 0, opt);
            scale = std::max(scale, std::abs(tv.value));
            if (coeff != Complex{}) out.values[k] += coeff * tv.value;
            tail_max = std::max(tail_max, tv.tail_bound);
        }
        err += std::abs(coeff) * tail_max;
    }
    out.err_bound = err;
    out.theta_scale = scale;
    out.base_point_witness = out.values.cwiseAbs().maxCoeff() <= 10.0 * err;
    return out;
}

ApPoint glue_normalize(const DegenerationModel& model, ApPoint p) {
    const int slots = model.g() - 1;
    if (p.slots() != slots) throw std::invalid_argument("glue_normalize: point has wrong number of slots");

    Complex z = p.z();
    std::vector<HomogCoord> coords = p.coords();

    // Branch identifications: each infinity slot maps to 0, translates z and
    // rescales the other slots.
    for (int i = 0; i < slots; ++i) {
        if (!coords[static_cast<std::size_t>(i)].at_infinity()) continue;
        z += model.tau_dprime(i);
        coords[static_cast<std::size_t>(i)] = HomogCoord{Complex{0.0, 0.0}, Complex{1.0, 0.0}};
        for (int j = 0; j < slots; ++j) {
            if (j == i) continue;
            coords[static_cast<std::size_t>(j)].u *= e_of(model.tau_prime(i, j));
        }
    }

    // Period reduction: removing n units of tau_g rescales every slot.
    long units_tau = 0;
    z = model.reduce_mod_lattice(z, nullptr, &units_tau);
    if (units_tau != 0) {
        for (int j = 0; j < slots; ++j)
            coords[static_cast<std::size_t>(j)].u *=
                e_of(-static_cast<double>(units_tau) * model.tau_dprime(j));
    }

    return ApPoint(z, std::move(coords)).normalized_scale();
}

std::vector<Complex> translate_set(const DegenerationModel& model, Complex x, double separation_floor) {
    const int slots = model.g() - 1;
    std::vector<Complex> points;
    points.reserve(1u << slots);
    for (unsigned q = 0; q < (1u << slots); ++q) {
        Complex p = x;
        for (int i = 0; i < slots; ++i)
            if ((q >> i) & 1u) p += model.tau_dprime(i);
        points.push_back(model.reduce_mod_lattice(p));
    }
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (model.curve_distance(points[i], points[j]) < separation_floor)
                throw GenericityError("translate_set: two translates collide");
    return points;
}

TangentFamily tangent_family(const DegenerationModel& model, const ApPoint& p, double tol,
                             const theta::EvalOptions& opt) {
    const int slots = model.g() - 1;
    if (p.slots() != slots) throw std::invalid_argument("tangent_family: point has wrong number of slots");
    for (const auto& c : p.coords())
        if (c.at_infinity())
            throw std::invalid_argument("tangent_family: point must be glue-normalized first");

    const ApPoint q = p.normalized_scale();
    TangentFamily fam;
    for (int i = 0; i < slots; ++i) {
        if (q.coords()[static_cast<std::size_t>(i)].at_zero())
            fam.zero_slots.push_back(i);
        else
            fam.finite_slots.push_back(i);
    }
    fam.h = static_cast<int>(fam.zero_slots.size());

    const int d = model.d();
    const int g = model.g();
    const int n_rows = g + fam.h + 1;
    fam.rows = Eigen::MatrixXcd::Zero(n_rows, d);

    // Sums run over masks supported on the finite slots; v^r enters through
    // the affine values of those slots.
    unsigned support = 0;
    std::vector<Complex> bit_factor(static_cast<std::size_t>(slots), Complex{0.0, 0.0});
    for (int l : fam.finite_slots) {
        support |= (1u << l);
        bit_factor[static_cast<std::size_t>(l)] = q.coords()[static_cast<std::size_t>(l)].affine();
    }

    double err_total = 0.0;
    double err = 0.0;
    int row = 0;

    SumSpec value_spec;
    fam.rows.row(row++) = masked_section_sum(model, q.z(), bit_factor, support, value_spec, tol, opt, &err);
    err_total = std::max(err_total, err);

    SumSpec deriv_spec;
    deriv_spec.deriv = 1;
    fam.rows.row(row++) = masked_section_sum(model, q.z(), bit_factor, support, deriv_spec, tol, opt, &err);
    err_total = std::max(err_total, err);

    for (int beta : fam.zero_slots) {
        for (int eps : {+1, -1}) {
            SumSpec spec;
            spec.shift = static_cast<double>(eps) * model.tau_dprime(beta);
            for (int j : fam.finite_slots)
                spec.extra_phase_per_bit[j] = static_cast<double>(eps) * model.tau_prime(beta, j);
            fam.rows.row(row++) = masked_section_sum(model, q.z(), bit_factor, support, spec, tol, opt, &err);
            err_total = std::max(err_total, err);
        }
    }

    for (int beta : fam.finite_slots) {
        SumSpec spec;
        spec.required = (1u << beta);
        fam.rows.row(row++) = masked_section_sum(model, q.z(), bit_factor, support, spec, tol, opt, &err);
        err_total = std::max(err_total, err);
    }

    fam.err_bound = err_total;
    return fam;
}

ThetaVectorFamily theta_vector_family(const DegenerationModel& model, Complex z, int h, double tol,
                                      const theta::EvalOptions& opt) {
    const int slots = model.g() - 1;
    if (h < 0 || h > slots) throw std::invalid_argument("theta_vector_family: stratum out of range");
    const int d = model.d();
    const int free_slots = slots - h;
    const int n_rows = (1 << (free_slots + 1)) * (h + 1);

    ThetaVectorFamily fam;
    fam.rows = Eigen::MatrixXcd::Zero(n_rows, d);
    fam.independence_applicable = n_rows <= d;

    int row = 0;
    double err = 0.0;
    for (unsigned r = 0; r < (1u << free_slots); ++r) {
        Complex base = z;
        for (int i = 0; i < free_slots; ++i)
            if ((r >> i) & 1u) base += model.tau_dprime(h + i);
        for (int variant = 0; variant < 2 * h + 2; ++variant) {
            Complex arg = base;
            int deriv = 0;
            if (variant == 1) {
                deriv = 1;
            } else if (variant >= 2) {
                const int beta = (variant - 2) / 2;
                const int eps = (variant % 2 == 0) ? +1 : -1;
                arg += static_cast<double>(eps) * model.tau_dprime(beta);
            }
            for (int k = 0; k < d; ++k) {
                const theta::ThetaValue tv = theta::vartheta(model.tau_g(), arg, k, d, tol, deriv, opt);
                fam.rows(row, k) = tv.value;
                err = std::max(err, tv.tail_bound);
            }
            ++row;
        }
    }
    fam.err_bound = err;
    return fam;
}

double limit_consistency(const DegenerationModel& model, double t_scale, int samples, double tol,
                         std::uint64_t seed, const theta::EvalOptions& opt) {
    if (!(t_scale > 0.0 && t_scale < 1.0))
        throw std::invalid_argument("limit_consistency: t_scale must lie in (0,1)");
    const int g = model.g();
    const int d = model.d();
    const int slots = g - 1;

    Eigen::MatrixXcd tau(g, g);
    const Complex diag{0.0, std::log(1.0 / t_scale) / 6.283185307179586477};
    for (int i = 0; i < slots; ++i) {
        tau(i, i) = diag;
        tau(i, g - 1) = tau(g - 1, i) = model.tau_dprime(i);
        for (int j = i + 1; j < slots; ++j) tau(i, j) = tau(j, i) = model.tau_prime(i, j);
    }
    tau(g - 1, g - 1) = model.tau_g();
    const theta::SiegelPoint sp(tau, d);

    LowDiscrepancy seq(slots + 2, seed);
    double worst = 0.0;
    for (int n = 0; n < samples; ++n) {
        Eigen::VectorXcd z(g);
        std::vector<HomogCoord> coords(static_cast<std::size_t>(slots));
        for (int i = 0; i < slots; ++i) {
            z[i] = Complex(seq.point(n, i), 0.0);
            coords[static_cast<std::size_t>(i)] = HomogCoord{e_of(z[i]), Complex{1.0, 0.0}};
        }
        const Complex zg = seq.point(n, slots) * static_cast<double>(d) +
                           seq.point(n, slots + 1) * model.tau_g();
        z[g - 1] = zg;

        const PhiValue phi = phi_sections(model, ApPoint(zg, coords), tol, opt);
        for (int k = 0; k < d; ++k) {
            const Complex full = theta::theta_k_section(sp, z, k, tol, opt).value;
            worst = std::max(worst, std::abs(full - phi.values[k]));
        }
    }
    return worst;
}

} // namespace ample::degen
