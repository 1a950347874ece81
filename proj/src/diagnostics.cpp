#include "ample/diagnostics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>

#include <boost/multiprecision/cpp_int.hpp>

#include "ample/optimize.hpp"
#include "ample/rng.hpp"

namespace ample::diag {

using degen::ApPoint;
using degen::DegenerationModel;
using degen::HomogCoord;

RankVerdict numerical_rank(const Eigen::MatrixXcd& m, double tol_rel) {
    if (!m.allFinite()) throw std::invalid_argument("numerical_rank: non-finite entries");
    RankVerdict v;
    v.rows = static_cast<int>(m.rows());
    v.cols = static_cast<int>(m.cols());
    v.tol_rel = tol_rel;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    const auto& sv = svd.singularValues();
    v.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double cutoff =
        sv.size() == 0 ? 0.0 : tol_rel * sv[0] * static_cast<double>(std::max(v.rows, v.cols));
    for (double s : v.singular_values)
        if (s > cutoff && s > 0.0) ++v.rank;
    return v;
}

double fs_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
    const double nu = u.norm(), nv = v.norm();
    if (nu == 0.0 || nv == 0.0) return 1.0;
    // orthogonal-residual form of sqrt(1 - |<u,v>|^2/(|u|^2 |v|^2)); the naive
    // formula bottoms out at sqrt(eps) near zero distance
    const Eigen::VectorXcd perp = v - u * (u.dot(v) / (nu * nu));
    return std::min(1.0, perp.norm() / nv);
}

RankVerdict projective_rank(const Eigen::MatrixXcd& m, double tol_rel) {
    Eigen::MatrixXcd scaled = m;
    for (Eigen::Index i = 0; i < scaled.rows(); ++i) {
        const double n = scaled.row(i).norm();
        if (n > 0.0) scaled.row(i) /= n;
    }
    return numerical_rank(scaled, tol_rel);
}

RankVerdict elliptic_independence_check(const DegenerationModel& model,
                                        std::span<const Complex> points, double tol_rel,
                                        double separation_floor, double tol,
                                        const theta::EvalOptions& opt) {
    if (points.empty()) throw std::invalid_argument("elliptic_independence_check: no points");
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (model.curve_distance(points[i], points[j]) < separation_floor)
                throw std::invalid_argument("elliptic_independence_check: points below separation floor");
    const int d = model.d();
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(points.size()), d);
    for (std::size_t j = 0; j < points.size(); ++j)
        for (int k = 0; k < d; ++k)
            m(static_cast<Eigen::Index>(j), k) =
                theta::vartheta(model.tau_g(), points[j], k, d, tol, 0, opt).value;
    return projective_rank(m, tol_rel);
}

namespace {

void parallel_for(long n, int threads, const std::function<void(long)>& body) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (long i = t; i < n; i += threads) body(i);
        });
    for (auto& th : pool) th.join();
}

// Parameterization of one fiber point: z = s*d + t*tau_g plus an affine value
// per finite slot, read in the chart fixed by `flip`.
struct PointShape {
    unsigned zero_mask = 0;
    std::vector<int> finite_slots;
    std::vector<char> flip; // per finite slot: coordinate is (1 : value)
    int params() const { return 2 + 2 * static_cast<int>(finite_slots.size()); }
};

PointShape shape_for_mask(int slots, unsigned zero_mask) {
    PointShape s;
    s.zero_mask = zero_mask;
    for (int i = 0; i < slots; ++i)
        if (!((zero_mask >> i) & 1u)) s.finite_slots.push_back(i);
    s.flip.assign(s.finite_slots.size(), 0);
    return s;
}

ApPoint point_from_params(const DegenerationModel& model, const PointShape& shape,
                          std::span<const double> p) {
    const int slots = model.g() - 1;
    const Complex z = p[0] * static_cast<double>(model.d()) + p[1] * model.tau_g();
    std::vector<HomogCoord> coords(static_cast<std::size_t>(slots),
                                   HomogCoord{Complex{0.0, 0.0}, Complex{1.0, 0.0}});
    for (std::size_t f = 0; f < shape.finite_slots.size(); ++f) {
        const Complex val{p[2 + 2 * f], p[3 + 2 * f]};
        const int slot = shape.finite_slots[f];
        coords[static_cast<std::size_t>(slot)] =
            shape.flip[f] ? HomogCoord{Complex{1.0, 0.0}, val} : HomogCoord{val, Complex{1.0, 0.0}};
    }
    return ApPoint(z, std::move(coords));
}

std::vector<unsigned> masks_with_popcount(int slots, int h) {
    std::vector<unsigned> out;
    for (unsigned m = 0; m < (1u << slots); ++m)
        if (std::popcount(m) == h) out.push_back(m);
    if (out.empty()) out.push_back(0);
    return out;
}

// Repeated simplex descent with shrinking initial steps.
double polish_min(const std::function<double(std::span<const double>)>& f, std::vector<double>& x,
                  int iterations, double step0, int rounds = 3) {
    double best = f(x);
    double step = step0;
    for (int r = 0; r < rounds; ++r) {
        const SimplexResult res = nelder_mead(f, x, step, iterations, 0.0);
        if (res.value < best) {
            best = res.value;
            x = res.x;
        }
        step *= 0.1;
    }
    return best;
}

double scale_free_residual(const DegenerationModel& model, const ApPoint& raw, double tol,
                           const theta::EvalOptions& opt) {
    // wrap into the fundamental domain first: projectively a no-op, but it
    // pins the evaluation scale (unbounded lifts would shrink the ratio)
    const ApPoint pt = glue_normalize(model, raw);
    const degen::PhiValue phi = phi_sections(model, pt, tol, opt);
    double scale = phi.theta_scale;
    if (model.d() == 1) {
        // A single section vanishes somewhere; its derivative keeps the
        // normalization away from 0/0 there.
        const theta::ThetaValue dv = theta::vartheta(model.tau_g(), pt.z(), 0, 1, tol, 1, opt);
        scale = std::max(scale, std::abs(dv.value) / 6.283185307179586477);
    }
    if (scale == 0.0) return 0.0;
    return phi.values.norm() / (scale * std::sqrt(static_cast<double>(model.d())));
}

} // namespace

BaseLocusResult base_locus_search(const DegenerationModel& model, int samples_per_stratum,
                                  int refine_iterations, std::uint64_t seed, double tol,
                                  const theta::EvalOptions& opt) {
    const int g = model.g();
    const int slots = g - 1;
    BaseLocusResult out;
    out.min_residual = std::numeric_limits<double>::infinity();

    for (int h = 0; h < g; ++h) {
        const auto masks = masks_with_popcount(slots, h);
        LowDiscrepancy seq(2 + 3 * std::max(slots, 1), seed ^ (0xb1u + static_cast<unsigned>(h)));
        double stratum_best = std::numeric_limits<double>::infinity();
        PointShape best_shape;
        std::vector<double> best_params;

        for (int n = 0; n < samples_per_stratum; ++n) {
            PointShape shape = shape_for_mask(slots, masks[static_cast<std::size_t>(n) % masks.size()]);
            std::vector<double> params(static_cast<std::size_t>(shape.params()));
            params[0] = seq.point(n, 0);
            params[1] = seq.point(n, 1);
            for (std::size_t f = 0; f < shape.finite_slots.size(); ++f) {
                const double r = std::sqrt(seq.point(n, 2 + 3 * static_cast<int>(f)));
                const double a = seq.point(n, 3 + 3 * static_cast<int>(f)) * 6.283185307179586477;
                shape.flip[f] = seq.point(n, 4 + 3 * static_cast<int>(f)) >= 0.5;
                params[2 + 2 * f] = r * std::cos(a);
                params[3 + 2 * f] = r * std::sin(a);
            }
            const ApPoint pt = point_from_params(model, shape, params);
            const double res = scale_free_residual(model, pt, tol, opt);
            ++out.samples;
            if (res < stratum_best) {
                stratum_best = res;
                best_shape = shape;
                best_params = params;
            }
        }

        if (!best_params.empty() && refine_iterations > 0) {
            const auto objective = [&](std::span<const double> p) {
                return scale_free_residual(model, point_from_params(model, best_shape, p), tol, opt);
            };
            stratum_best = polish_min(objective, best_params, refine_iterations, 0.05);
        }
        if (stratum_best < out.min_residual) {
            out.min_residual = stratum_best;
            out.argmin = glue_normalize(model, point_from_params(model, best_shape, best_params));
        }
    }
    return out;
}

ProductCheckResult product_construction_check(int g, int d, std::span<const Complex> taus,
                                              int samples, int refine_iterations,
                                              std::uint64_t seed, double zero_threshold, double tol,
                                              const theta::EvalOptions& opt) {
    if (static_cast<int>(taus.size()) != g)
        throw std::invalid_argument("product_construction_check: need one tau per factor");
    if (d < 2) throw std::invalid_argument("product_construction_check: d must be >= 2");
    for (Complex t : taus)
        if (!(t.imag() > 0.0))
            throw std::invalid_argument("product_construction_check: Im(tau_j) must be positive");

    const auto residual = [&](std::span<const double> p) {
        // p holds (s_j, t_j) per factor; sections are products of the
        // one-variable values across factors.
        Eigen::MatrixXcd vals(g, d);
        double denom = 1.0;
        for (int j = 0; j < g; ++j) {
            const Complex z = p[2 * static_cast<std::size_t>(j)] * static_cast<double>(d) +
                              p[2 * static_cast<std::size_t>(j) + 1] * taus[static_cast<std::size_t>(j)];
            double mx = 0.0;
            for (int k = 0; k < d; ++k) {
                vals(j, k) = theta::vartheta(taus[static_cast<std::size_t>(j)], z, k, d, tol, 0, opt).value;
                mx = std::max(mx, std::abs(vals(j, k)));
            }
            denom *= mx;
        }
        double num = 0.0;
        for (int k = 0; k < d; ++k) {
            Complex prod = 1.0;
            for (int j = 0; j < g; ++j) prod *= vals(j, k);
            num += std::norm(prod);
        }
        return std::sqrt(num / static_cast<double>(d)) / denom;
    };

    LowDiscrepancy seq(2 * g, seed ^ 0x9dULL);
    struct Candidate {
        double value;
        std::vector<double> params;
    };
    std::vector<Candidate> top;
    for (int n = 0; n < samples; ++n) {
        std::vector<double> p(static_cast<std::size_t>(2 * g));
        for (int c = 0; c < 2 * g; ++c) p[static_cast<std::size_t>(c)] = seq.point(n, c);
        top.push_back({residual(p), std::move(p)});
        std::sort(top.begin(), top.end(),
                  [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
        if (top.size() > 8) top.pop_back();
    }

    ProductCheckResult out;
    out.min_residual = std::numeric_limits<double>::infinity();
    for (auto& cand : top) {
        double v = cand.value;
        if (refine_iterations > 0) v = polish_min(residual, cand.params, refine_iterations, 0.04, 4);
        if (v < out.min_residual) {
            out.min_residual = v;
            out.witness.clear();
            for (int j = 0; j < g; ++j)
                out.witness.push_back(cand.params[2 * static_cast<std::size_t>(j)] * static_cast<double>(d) +
                                      cand.params[2 * static_cast<std::size_t>(j) + 1] *
                                          taus[static_cast<std::size_t>(j)]);
        }
    }
    out.common_zero_found = out.min_residual < zero_threshold;
    return out;
}

ImmersionReport immersion_check(const DegenerationModel& model, int points_per_stratum,
                                double tol_rel, std::uint64_t seed, double tol,
                                const theta::EvalOptions& opt) {
    const int g = model.g();
    const int slots = g - 1;
    ImmersionReport report;
    for (int h = 0; h < g; ++h) {
        ImmersionRow row;
        row.h = h;
        row.expected_rank = g + h + 1;
        row.min_rank = std::numeric_limits<int>::max();
        row.max_rank = 0;
        const auto masks = masks_with_popcount(slots, h);
        LowDiscrepancy seq(2 + 3 * std::max(slots, 1), seed ^ (0x55u + static_cast<unsigned>(h)));
        for (int n = 0; n < points_per_stratum; ++n) {
            PointShape shape = shape_for_mask(slots, masks[static_cast<std::size_t>(n) % masks.size()]);
            std::vector<double> params(static_cast<std::size_t>(shape.params()));
            params[0] = seq.point(n, 0);
            params[1] = seq.point(n, 1);
            for (std::size_t f = 0; f < shape.finite_slots.size(); ++f) {
                // keep finite values well away from 0 and infinity
                const double r = 0.35 + 0.6 * seq.point(n, 2 + 3 * static_cast<int>(f));
                const double a = seq.point(n, 3 + 3 * static_cast<int>(f)) * 6.283185307179586477;
                shape.flip[f] = seq.point(n, 4 + 3 * static_cast<int>(f)) >= 0.5;
                params[2 + 2 * f] = r * std::cos(a);
                params[3 + 2 * f] = r * std::sin(a);
            }
            const ApPoint pt = point_from_params(model, shape, params);
            const degen::TangentFamily fam = tangent_family(model, pt, tol, opt);
            const RankVerdict rv = projective_rank(fam.rows, tol_rel);
            row.min_rank = std::min(row.min_rank, rv.rank);
            row.max_rank = std::max(row.max_rank, rv.rank);
            ++row.points;
        }
        if (row.points == 0) row.min_rank = 0;
        report.all_expected &= (row.min_rank == row.expected_rank && row.max_rank == row.expected_rank);
        report.table.push_back(row);
    }
    return report;
}

std::vector<std::pair<int, int>> degree_divisibility_scan(int g_max) {
    if (g_max < 1) throw std::invalid_argument("degree_divisibility_scan: g_max must be >= 1");
    using boost::multiprecision::cpp_int;
    std::vector<std::pair<int, int>> out;
    for (int g = 1; g <= g_max; ++g) {
        cpp_int fact = 1;
        for (int i = 2; i <= g; ++i) fact *= i;
        for (int d = g + 1; d <= 2 * g + 1; ++d) {
            cpp_int binom = 1;
            for (int i = 1; i <= g + 1; ++i) {
                binom *= (d - g - 1 + i);
                binom /= i; // exact: the running product is a binomial
            }
            if (binom % fact == 0) out.emplace_back(g, d);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Collision search
// ---------------------------------------------------------------------------

namespace {

double chart_separation_raw(const DegenerationModel& model, const ApPoint& a, const ApPoint& b) {
    double sep = model.curve_distance(a.z(), b.z());
    const auto an = a.normalized_scale();
    const auto bn = b.normalized_scale();
    for (int i = 0; i < a.slots(); ++i) {
        const auto& ca = an.coords()[static_cast<std::size_t>(i)];
        const auto& cb = bn.coords()[static_cast<std::size_t>(i)];
        const double na = std::sqrt(std::norm(ca.u) + std::norm(ca.v));
        const double nb = std::sqrt(std::norm(cb.u) + std::norm(cb.v));
        sep += std::abs(ca.u * cb.v - ca.v * cb.u) / (na * nb);
    }
    return sep;
}

// Representatives reachable by formally applying the branch identification to
// slots lying within a tiny band of the infinity seam. Points on different
// sides of the seam are the same fiber point up to O(band); the plain chart
// metric would call them far apart.
std::vector<ApPoint> seam_representatives(const DegenerationModel& model, const ApPoint& p,
                                          double band) {
    const int slots = p.slots();
    std::vector<int> near_inf;
    const ApPoint base = p.normalized_scale();
    for (int i = 0; i < slots; ++i) {
        const auto& c = base.coords()[static_cast<std::size_t>(i)];
        if (!c.at_infinity() && std::abs(c.v) <= band * std::abs(c.u)) near_inf.push_back(i);
    }
    std::vector<ApPoint> reps{base};
    for (unsigned mask = 1; mask < (1u << near_inf.size()); ++mask) {
        Complex z = base.z();
        auto coords = base.coords();
        for (std::size_t bit = 0; bit < near_inf.size(); ++bit) {
            if (!((mask >> bit) & 1u)) continue;
            const int i = near_inf[bit];
            z += model.tau_dprime(i);
            std::swap(coords[static_cast<std::size_t>(i)].u, coords[static_cast<std::size_t>(i)].v);
            for (int j = 0; j < slots; ++j)
                if (j != i) coords[static_cast<std::size_t>(j)].u *= theta::e_of(model.tau_prime(i, j));
        }
        reps.push_back(glue_normalize(model, ApPoint(z, coords)));
    }
    return reps;
}

double chart_separation(const DegenerationModel& model, const ApPoint& a, const ApPoint& b,
                        double band) {
    double sep = std::numeric_limits<double>::infinity();
    for (const auto& ra : seam_representatives(model, a, band))
        for (const auto& rb : seam_representatives(model, b, band))
            sep = std::min(sep, chart_separation_raw(model, ra, rb));
    return sep;
}

struct PairShape {
    PointShape p, q;
    int params() const { return p.params() + q.params(); }
};

struct PairEval {
    double fs = 1.0;
    double separation = 0.0;
    double objective = 1e9;
};

PairEval eval_pair(const DegenerationModel& model, const PairShape& shape,
                   std::span<const double> params, double tol, double separation_floor,
                   const theta::EvalOptions& opt) {
    // evaluate at the wrapped representatives; drifting lifts would otherwise
    // collapse both images onto a coordinate axis and fake a collision
    const ApPoint P = glue_normalize(
        model, point_from_params(model, shape.p, params.subspan(0, shape.p.params())));
    const ApPoint Q = glue_normalize(
        model, point_from_params(model, shape.q,
                                 params.subspan(static_cast<std::size_t>(shape.p.params()))));
    PairEval ev;
    const degen::PhiValue fp = phi_sections(model, P, tol, opt);
    const degen::PhiValue fq = phi_sections(model, Q, tol, opt);
    ev.fs = fs_distance(fp.values, fq.values);
    ev.separation = chart_separation(model, P, Q, separation_floor);
    const double penalty =
        ev.separation >= separation_floor ? 0.0 : 10.0 * (separation_floor - ev.separation) / separation_floor;
    ev.objective = ev.fs + penalty;
    return ev;
}

struct RestartOutcome {
    double fs = 1.0;
    double separation = 0.0;
    bool candidate = false;
    PairShape shape;
    std::vector<double> params;
};

// Proportionality defect of a {0,1}^slots-indexed coefficient tensor: zero
// iff it factors as prod_i w_i^{q_i} (a Segre point).
double rank1_residual(const Eigen::VectorXcd& coeffs, int slots) {
    double worst = 0.0;
    for (int i = 0; i < slots; ++i) {
        Eigen::VectorXcd a(coeffs.size() / 2), b(coeffs.size() / 2);
        Eigen::Index n = 0;
        for (unsigned m = 0; m < static_cast<unsigned>(coeffs.size()); ++m) {
            if ((m >> i) & 1u) continue;
            a[n] = coeffs[m];
            b[n] = coeffs[m | (1u << i)];
            ++n;
        }
        const double na = a.norm(), nb = b.norm();
        if (na == 0.0 || nb == 0.0) continue; // a zero slice factors through the stratum
        const double c = std::abs(a.dot(b)) / (na * nb);
        worst = std::max(worst, std::sqrt(std::max(0.0, 1.0 - c * c)));
    }
    return worst;
}

std::vector<Complex> rank1_factor(const Eigen::VectorXcd& coeffs, int slots) {
    std::vector<Complex> w(static_cast<std::size_t>(slots));
    for (int i = 0; i < slots; ++i) {
        Complex num = 0.0;
        double den = 0.0;
        for (unsigned m = 0; m < static_cast<unsigned>(coeffs.size()); ++m) {
            if ((m >> i) & 1u) continue;
            num += std::conj(coeffs[m]) * coeffs[m | (1u << i)];
            den += std::norm(coeffs[m]);
        }
        w[static_cast<std::size_t>(i)] = den > 0.0 ? num / den : Complex{0.0, 0.0};
    }
    return w;
}

} // namespace

InjectivityResult injectivity_search(const DegenerationModel& model,
                                     const InjectivityOptions& options, std::uint64_t seed) {
    const int g = model.g();
    const int d = model.d();
    const int slots = g - 1;
    if (d <= (1 << (g - 1)))
        throw std::invalid_argument("injectivity_search: requires d > 2^{g-1} so the map is a morphism");
    const theta::EvalOptions opt{};

    InjectivityResult result;
    result.stats.restarts = options.restarts;

    std::vector<RestartOutcome> outcomes(static_cast<std::size_t>(options.restarts));

    const auto run_restart = [&](long r) {
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
        RestartOutcome& out = outcomes[static_cast<std::size_t>(r)];

        // stratum quota: mostly smooth points, a fixed share of deeper strata
        const int mod = static_cast<int>(r % 10);
        int hp = 0, hq = 0;
        if (mod == 7) hp = std::min(1, slots);
        if (mod == 9) hq = std::min(std::max(1, static_cast<int>(r / 10) % g), slots);

        PairShape shape;
        const auto masks_p = masks_with_popcount(slots, hp);
        const auto masks_q = masks_with_popcount(slots, hq);
        shape.p = shape_for_mask(slots, masks_p[rng.next_u64() % masks_p.size()]);
        shape.q = shape_for_mask(slots, masks_q[rng.next_u64() % masks_q.size()]);

        std::vector<double> params(static_cast<std::size_t>(shape.params()));
        auto draw_point = [&](PointShape& ps, std::span<double> dst) {
            dst[0] = rng.next_double();
            dst[1] = rng.next_double();
            for (std::size_t f = 0; f < ps.finite_slots.size(); ++f) {
                const double rad = std::sqrt(rng.next_double());
                const double ang = rng.next_double() * 6.283185307179586477;
                ps.flip[f] = rng.next_double() >= 0.5;
                dst[2 + 2 * f] = rad * std::cos(ang);
                dst[3 + 2 * f] = rad * std::sin(ang);
            }
        };
        draw_point(shape.p, std::span<double>(params).subspan(0, shape.p.params()));
        draw_point(shape.q,
                   std::span<double>(params).subspan(static_cast<std::size_t>(shape.p.params())));

        if (r % 2 == 0) {
            // translate-set overlap seed: base the second fiber at x + q.a
            unsigned qmask = slots > 0 ? 1u + static_cast<unsigned>(rng.next_u64() % ((1u << slots) - 1u)) : 0u;
            Complex zq = params[0] * static_cast<double>(d) + params[1] * model.tau_g();
            for (int i = 0; i < slots; ++i)
                if ((qmask >> i) & 1u) zq += model.tau_dprime(i);
            zq += Complex(0.01 * rng.gaussian(), 0.01 * rng.gaussian());
            zq = model.reduce_mod_lattice(zq);
            const double t = zq.imag() / model.tau_g().imag();
            params[static_cast<std::size_t>(shape.p.params())] =
                (zq.real() - t * model.tau_g().real()) / static_cast<double>(d);
            params[static_cast<std::size_t>(shape.p.params()) + 1] = t;
        }

        const auto objective = [&](std::span<const double> p) {
            return eval_pair(model, shape, p, options.tol, options.separation_floor, opt).objective;
        };
        const SimplexResult res = nelder_mead(objective, params, 0.08, options.iterations, 0.0);
        params = res.x;
        PairEval ev = eval_pair(model, shape, params, options.tol, options.separation_floor, opt);
        if (ev.objective < 1e-4) {
            polish_min(objective, params, 4 * options.iterations, 0.01);
            ev = eval_pair(model, shape, params, options.tol, options.separation_floor, opt);
        }
        out.fs = ev.fs;
        out.separation = ev.separation;
        out.candidate = ev.fs < 10.0 * options.delta_coll && ev.separation >= options.separation_floor;
        if (out.candidate) {
            out.shape = shape;
            out.params = params;
        }
    };

    parallel_for(options.restarts, options.threads, run_restart);

    std::vector<std::pair<PairShape, std::vector<double>>> candidates;
    for (const auto& out : outcomes) {
        if (out.separation >= options.separation_floor)
            result.stats.best_fs = std::min(result.stats.best_fs, out.fs);
        if (out.candidate) candidates.emplace_back(out.shape, out.params);
    }

    // Structured scan: pairs of fibers whose joined translate sets become
    // linearly dependent, then Segre membership of the common image point.
    if (options.structured && g >= 2 && d == (1 << g)) {
        const int S = 1 << slots;
        const auto lift = [&](double re01, double im01, double span_re) {
            return Complex(re01 * span_re, 0.0) + im01 * model.tau_g();
        };
        const auto build_a = [&](Complex x) {
            Eigen::MatrixXcd a(d, S);
            for (unsigned q = 0; q < static_cast<unsigned>(S); ++q) {
                Complex arg = x;
                for (int i = 0; i < slots; ++i)
                    if ((q >> i) & 1u) arg += model.tau_dprime(i);
                for (int k = 0; k < d; ++k)
                    a(k, static_cast<int>(q)) =
                        theta::vartheta(model.tau_g(), arg, k, d, options.tol, 0, opt).value;
            }
            return a;
        };
        const auto norm_det = [&](const Eigen::MatrixXcd& ax, const Eigen::MatrixXcd& ay) {
            Eigen::MatrixXcd m(d, 2 * S);
            m.leftCols(S) = ax;
            m.rightCols(S) = -ay;
            for (int c = 0; c < 2 * S; ++c) m.col(c) /= m.col(c).norm();
            return std::abs(Eigen::PartialPivLU<Eigen::MatrixXcd>(m).determinant());
        };

        const int nx_re = 14, nx_im = 9, ny_re = 6 * d, ny_im = 9;
        std::vector<Eigen::MatrixXcd> grid_a(static_cast<std::size_t>(ny_re * ny_im));
        std::vector<Complex> grid_y(grid_a.size());
        parallel_for(static_cast<long>(grid_a.size()), options.threads, [&](long i) {
            const int iy = static_cast<int>(i) % ny_re, jy = static_cast<int>(i) / ny_re;
            const Complex y = lift((iy + 0.5) / ny_re, (jy + 0.5) / ny_im, static_cast<double>(d));
            grid_y[static_cast<std::size_t>(i)] = y;
            grid_a[static_cast<std::size_t>(i)] = build_a(y);
        });

        struct Branch {
            Complex x, y;
            double segre = 1e9;
        };
        std::vector<std::vector<Branch>> branch_rows(static_cast<std::size_t>(nx_re * nx_im));

        parallel_for(static_cast<long>(nx_re) * nx_im, options.threads, [&](long xi) {
            const int ix = static_cast<int>(xi) % nx_re, jx = static_cast<int>(xi) / nx_re;
            const Complex x = lift((ix + 0.5) / nx_re, (jx + 0.5) / nx_im, 1.0);
            const Eigen::MatrixXcd ax = build_a(x);

            std::vector<double> dets(grid_a.size());
            for (std::size_t i = 0; i < grid_a.size(); ++i) dets[i] = norm_det(ax, grid_a[i]);
            for (std::size_t i = 0; i < grid_a.size(); ++i) {
                if (dets[i] > 0.25) continue;
                // local minimum on the torus grid
                const int iy = static_cast<int>(i) % ny_re, jy = static_cast<int>(i) / ny_re;
                bool local_min = true;
                for (int di = -1; di <= 1 && local_min; ++di)
                    for (int dj = -1; dj <= 1; ++dj) {
                        const int ni = (iy + di + ny_re) % ny_re, nj = (jy + dj + ny_im) % ny_im;
                        if (dets[static_cast<std::size_t>(nj * ny_re + ni)] < dets[i]) {
                            local_min = false;
                            break;
                        }
                    }
                if (!local_min) continue;

                // complex Newton iteration on the holomorphic determinant
                Complex y = grid_y[i];
                double fval = dets[i];
                for (int it = 0; it < 14 && fval > 1e-12; ++it) {
                    const double h = 1e-6;
                    // signed determinant is needed for the Newton step
                    const auto sdet = [&](Complex yy) {
                        Eigen::MatrixXcd mm(d, 2 * S);
                        mm.leftCols(S) = ax;
                        mm.rightCols(S) = -build_a(yy);
                        for (int c = 0; c < 2 * S; ++c) mm.col(c) /= mm.col(c).norm();
                        return Eigen::PartialPivLU<Eigen::MatrixXcd>(mm).determinant();
                    };
                    const Complex f0 = sdet(y);
                    const Complex fp = (sdet(y + Complex(h, 0)) - sdet(y - Complex(h, 0))) / (2 * h);
                    if (fp == Complex{}) break;
                    y -= f0 / fp;
                    fval = std::abs(f0);
                }
                if (fval > 1e-8) continue;

                // null vector -> Segre residuals of both coefficient blocks
                Eigen::MatrixXcd mm(d, 2 * S);
                mm.leftCols(S) = ax;
                mm.rightCols(S) = -build_a(y);
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mm, Eigen::ComputeFullV);
                const Eigen::VectorXcd null = svd.matrixV().col(2 * S - 1);
                Eigen::VectorXcd u = null.head(S), v = null.tail(S);
                for (unsigned q = 0; q < static_cast<unsigned>(S); ++q) {
                    std::vector<int> qv(static_cast<std::size_t>(slots));
                    for (int b = 0; b < slots; ++b) qv[static_cast<std::size_t>(b)] = (q >> b) & 1;
                    const Complex cq = c_coefficient(qv, model);
                    u[static_cast<int>(q)] /= cq;
                    v[static_cast<int>(q)] /= cq;
                }
                Branch br{x, model.reduce_mod_lattice(y),
                          rank1_residual(u, slots) + rank1_residual(v, slots)};
                branch_rows[static_cast<std::size_t>(xi)].push_back(br);
            }
        });

        std::vector<Branch> branches;
        for (auto& row : branch_rows)
            for (auto& b : row) branches.push_back(b);
        result.stats.structured_roots = static_cast<long>(branches.size());
        std::stable_sort(branches.begin(), branches.end(),
                         [](const Branch& a, const Branch& b) { return a.segre < b.segre; });
        if (branches.size() > 80) branches.resize(80);

        for (const auto& br : branches) {
            // descend the Segre defect along the dependency curve in x
            Complex warm_y = br.y;
            Eigen::VectorXcd last_u, last_v;
            const auto segre_at = [&](std::span<const double> xp) -> double {
                const Complex x = Complex(xp[0], 0.0) + xp[1] * model.tau_g();
                const Eigen::MatrixXcd ax = build_a(x);
                Complex y = warm_y;
                const auto sdet = [&](Complex yy) {
                    Eigen::MatrixXcd mm(d, 2 * S);
                    mm.leftCols(S) = ax;
                    mm.rightCols(S) = -build_a(yy);
                    for (int c = 0; c < 2 * S; ++c) mm.col(c) /= mm.col(c).norm();
                    return Eigen::PartialPivLU<Eigen::MatrixXcd>(mm).determinant();
                };
                for (int it = 0; it < 8; ++it) {
                    const double h = 1e-6;
                    const Complex f0 = sdet(y);
                    if (std::abs(f0) < 1e-13) break;
                    const Complex fp = (sdet(y + Complex(h, 0)) - sdet(y - Complex(h, 0))) / (2 * h);
                    if (fp == Complex{}) return 1e9;
                    y -= f0 / fp;
                }
                warm_y = y;
                Eigen::MatrixXcd mm(d, 2 * S);
                mm.leftCols(S) = ax;
                mm.rightCols(S) = -build_a(y);
                Eigen::JacobiSVD<Eigen::MatrixXcd> svd(mm, Eigen::ComputeFullV);
                const Eigen::VectorXcd null = svd.matrixV().col(2 * S - 1);
                Eigen::VectorXcd u = null.head(S), v = null.tail(S);
                for (unsigned q = 0; q < static_cast<unsigned>(S); ++q) {
                    std::vector<int> qv(static_cast<std::size_t>(slots));
                    for (int b = 0; b < slots; ++b) qv[static_cast<std::size_t>(b)] = (q >> b) & 1;
                    const Complex cq = c_coefficient(qv, model);
                    u[static_cast<int>(q)] /= cq;
                    v[static_cast<int>(q)] /= cq;
                }
                last_u = u;
                last_v = v;
                return rank1_residual(u, slots) + rank1_residual(v, slots);
            };

            std::vector<double> xp{br.x.real(), br.x.imag() / model.tau_g().imag()};
            const double defect = polish_min(segre_at, xp, 80, 0.02, 2);
            if (defect > 2e-3 || last_u.size() == 0) continue;

            const Complex x = Complex(xp[0], 0.0) + xp[1] * model.tau_g();
            const auto wp = rank1_factor(last_u, slots);
            const auto wq = rank1_factor(last_v, slots);
            PairShape shape;
            shape.p = shape_for_mask(slots, 0);
            shape.q = shape_for_mask(slots, 0);
            std::vector<double> params(static_cast<std::size_t>(shape.params()));
            params[0] = x.real() / d;
            params[1] = x.imag() / model.tau_g().imag();
            params[static_cast<std::size_t>(shape.p.params())] = warm_y.real() / d;
            params[static_cast<std::size_t>(shape.p.params()) + 1] = warm_y.imag() / model.tau_g().imag();
            for (int i = 0; i < slots; ++i) {
                params[2 + 2 * static_cast<std::size_t>(i)] = wp[static_cast<std::size_t>(i)].real();
                params[3 + 2 * static_cast<std::size_t>(i)] = wp[static_cast<std::size_t>(i)].imag();
                params[static_cast<std::size_t>(shape.p.params()) + 2 + 2 * static_cast<std::size_t>(i)] =
                    wq[static_cast<std::size_t>(i)].real();
                params[static_cast<std::size_t>(shape.p.params()) + 3 + 2 * static_cast<std::size_t>(i)] =
                    wq[static_cast<std::size_t>(i)].imag();
            }
            const auto objective = [&](std::span<const double> p) {
                return eval_pair(model, shape, p, options.tol, options.separation_floor, opt).objective;
            };
            polish_min(objective, params, 6 * options.iterations, 0.01);
            candidates.emplace_back(shape, params);
        }
    }

    // Verification: every candidate must survive ten-fold tighter refinement.
    for (auto& [shape, params] : candidates) {
        ++result.stats.candidates_polished;
        const double tight_tol = options.tol / 10.0;
        const auto objective = [&](std::span<const double> p) {
            return eval_pair(model, shape, p, tight_tol, options.separation_floor, opt).objective;
        };
        polish_min(objective, params, 10 * options.iterations, 1e-3);
        const PairEval ev = eval_pair(model, shape, params, tight_tol, options.separation_floor, opt);
        result.stats.best_fs = std::min(result.stats.best_fs, ev.fs);
        if (!(ev.fs < options.delta_coll) || ev.separation < options.separation_floor) continue;

        const ApPoint P = glue_normalize(
            model, point_from_params(model, shape.p, std::span<const double>(params).subspan(0, shape.p.params())));
        const ApPoint Q = glue_normalize(
            model, point_from_params(model, shape.q,
                                     std::span<const double>(params).subspan(
                                         static_cast<std::size_t>(shape.p.params()))));
        CollisionWitness w{P, Q, ev.fs, ev.separation, 0, 0, false};
        const degen::TangentFamily fp = tangent_family(model, P, options.tol);
        const degen::TangentFamily fq = tangent_family(model, Q, options.tol);
        w.rank_p = projective_rank(fp.rows, options.tol_rel).rank;
        w.rank_q = projective_rank(fq.rows, options.tol_rel).rank;
        w.transversal = (w.rank_p == g + P.stratum() + 1) && (w.rank_q == g + Q.stratum() + 1);

        // dedupe against witnesses already collected
        bool duplicate = false;
        for (const auto& prev : result.witnesses) {
            if ((model.curve_distance(prev.p.z(), P.z()) < 1e-4 &&
                 model.curve_distance(prev.q.z(), Q.z()) < 1e-4) ||
                (model.curve_distance(prev.p.z(), Q.z()) < 1e-4 &&
                 model.curve_distance(prev.q.z(), P.z()) < 1e-4)) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) result.witnesses.push_back(std::move(w));
    }

    std::stable_sort(result.witnesses.begin(), result.witnesses.end(),
                     [](const CollisionWitness& a, const CollisionWitness& b) { return a.fs < b.fs; });
    return result;
}

} // namespace ample::diag
