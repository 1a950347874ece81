#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ample/degeneration.hpp"
#include "ample/theta.hpp"

namespace ample::diag {

using Complex = std::complex<double>;

struct RankVerdict {
    int rows = 0, cols = 0;
    std::vector<double> singular_values; // nonincreasing
    int rank = 0;
    double tol_rel = 0.0;
    /// Ratio of the smallest retained singular value to the largest (1 if rank 0).
    double retained_ratio() const {
        if (rank == 0 || singular_values.empty() || singular_values.front() == 0.0) return 1.0;
        return singular_values[static_cast<std::size_t>(rank - 1)] / singular_values.front();
    }
};

/// Singular-value rank at relative tolerance: retained iff
/// sigma > tol_rel * sigma_max * max(rows, cols).
RankVerdict numerical_rank(const Eigen::MatrixXcd& m, double tol_rel);

/// Rank of a matrix whose rows are projective points: rows are normalized to
/// unit length first, so the verdict is independent of representative scale.
RankVerdict projective_rank(const Eigen::MatrixXcd& m, double tol_rel);

/// Chordal Fubini-Study distance sqrt(1 - |<u,v>|^2 / (|u|^2 |v|^2)).
double fs_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v);

/// Rank of the n x d section-value matrix at n distinct curve points; full
/// rank expected whenever n <= d-1.
RankVerdict elliptic_independence_check(const degen::DegenerationModel& model,
                                        std::span<const Complex> points, double tol_rel,
                                        double separation_floor, double tol,
                                        const theta::EvalOptions& opt = {});

struct BaseLocusResult {
    double min_residual = 0.0;
    std::optional<degen::ApPoint> argmin;
    long samples = 0;
};

/// Stratified low-discrepancy sweep over the fiber followed by simplex
/// refinement, minimizing the scale-free residual |Phi(P)| / max |vartheta|.
/// A (near-)zero is a finding, not an error.
BaseLocusResult base_locus_search(const degen::DegenerationModel& model, int samples_per_stratum,
                                  int refine_iterations, std::uint64_t seed, double tol,
                                  const theta::EvalOptions& opt = {});

struct ProductCheckResult {
    bool common_zero_found = false;
    double min_residual = 0.0;
    std::vector<Complex> witness; // z_1..z_g lifts
};

/// Product-of-curves construction: sections P_lam(z) = prod_j vartheta_lam(tau_j, z_j)
/// on E_1 x ... x E_g; searches for a common zero of all d of them.
ProductCheckResult product_construction_check(int g, int d, std::span<const Complex> taus,
                                              int samples, int refine_iterations,
                                              std::uint64_t seed, double zero_threshold, double tol,
                                              const theta::EvalOptions& opt = {});

struct CollisionWitness {
    degen::ApPoint p;
    degen::ApPoint q;
    double fs = 1.0;
    double separation = 0.0;
    int rank_p = 0;
    int rank_q = 0;
    bool transversal = false; // full differential rank at both points
};

struct SearchStats {
    long restarts = 0;
    long candidates_polished = 0;
    long structured_roots = 0;
    double best_fs = 1.0;
};

struct InjectivityResult {
    std::vector<CollisionWitness> witnesses; // sorted by fs distance
    SearchStats stats;
};

struct InjectivityOptions {
    long restarts = 10000;
    int iterations = 120;
    double delta_coll = 1e-8;
    double separation_floor = 1e-3;
    double tol = 1e-12;
    double tol_rel = 1e-8;
    bool structured = true; // determinant-curve scan (applies when d = 2^g)
    int threads = 1;
};

/// Multi-start minimization of the Fubini-Study distance between section
/// images of distinct points, seeded by translate-set overlaps; witnesses are
/// kept only if they survive re-verification at ten-fold tighter refinement.
InjectivityResult injectivity_search(const degen::DegenerationModel& model,
                                     const InjectivityOptions& options, std::uint64_t seed);

struct ImmersionRow {
    int h = 0;
    int expected_rank = 0;
    int min_rank = 0;
    int max_rank = 0;
    int points = 0;
};

struct ImmersionReport {
    std::vector<ImmersionRow> table;
    bool all_expected = true;
};

/// Numerical rank of the tangent spanning family at sampled points of every
/// stratum; the expected rank is g + h + 1.
ImmersionReport immersion_check(const degen::DegenerationModel& model, int points_per_stratum,
                                double tol_rel, std::uint64_t seed, double tol,
                                const theta::EvalOptions& opt = {});

/// Exact enumeration of pairs (g, d) with g < d <= 2g+1 such that
/// binomial(d, g+1) is divisible by g!.
std::vector<std::pair<int, int>> degree_divisibility_scan(int g_max);

} // namespace ample::diag
