#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "ample/theta.hpp"

namespace ample::degen {

using Complex = std::complex<double>;

/// Raised when the bounded integer-relation search finds a relation among the
/// translation points, i.e. the model fails its genericity certificate.
class GenericityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A homogeneous coordinate pair (u : v) on one projective-line factor.
struct HomogCoord {
    Complex u{0.0, 0.0};
    Complex v{1.0, 0.0};
    bool at_zero() const { return u == Complex{}; }
    bool at_infinity() const { return v == Complex{}; }
    Complex affine() const { return u / v; } // only valid off infinity
};

struct GenericityOptions {
    int n_rel = 8;
    double tol = 1e-9;
};

/// The rank-(g-1) degenerate fiber datum: curve modulus tau_g, polarization d,
/// the mixed entries tau'' = (tau_{1g},...,tau_{g-1,g}) and the fixed
/// off-diagonal block tau'. The base elliptic curve is E = C/(Zd + Z tau_g).
class DegenerationModel {
public:
    /// tau_prime is (g-1)x(g-1), symmetric, with zero diagonal (the diagonal
    /// directions are the degenerating ones and are not model data).
    DegenerationModel(int g, int d, Eigen::MatrixXcd tau_prime, Eigen::VectorXcd tau_dprime,
                      Complex tau_g, const GenericityOptions& gen = {});

    int g() const { return g_; }
    int d() const { return d_; }
    Complex tau_prime(int i, int j) const;   // i != j, 0-based slots
    Complex tau_dprime(int i) const { return tau_dprime_[i]; }
    const Eigen::VectorXcd& tau_dprime() const { return tau_dprime_; }
    Complex tau_g() const { return tau_g_; }

    /// Derived nomes: t(i,j) = e(tau'_ij) between slots, t_mixed(i) = e(tau''_i / d).
    Complex t_prime(int i, int j) const { return theta::e_of(tau_prime(i, j)); }
    Complex t_mixed(int i) const { return theta::e_of(tau_dprime_[i] / static_cast<double>(d_)); }

    /// Reduce a lift into the fundamental rectangle [0,d) + [0,1) tau_g.
    /// Returns the reduced lift; the integer multiples removed go to the
    /// optional out-parameters.
    Complex reduce_mod_lattice(Complex z, long* units_d = nullptr, long* units_tau = nullptr) const;

    /// Shortest-translate distance between two points of E given by lifts.
    double curve_distance(Complex a, Complex b) const;

private:
    int g_, d_;
    Eigen::MatrixXcd tau_prime_;
    Eigen::VectorXcd tau_dprime_;
    Complex tau_g_;

    void certify_genericity(const GenericityOptions& gen) const;
};

/// A point of the degenerate fiber in branch coordinates: the covering-line
/// coordinate z_g plus one homogeneous pair per projective-line factor.
/// The stratum index counts coordinates sitting at 0 or infinity.
class ApPoint {
public:
    ApPoint(Complex z, std::vector<HomogCoord> coords);

    Complex z() const { return z_; }
    const std::vector<HomogCoord>& coords() const { return coords_; }
    int stratum() const { return stratum_; }
    int slots() const { return static_cast<int>(coords_.size()); }

    /// Rescale every pair so max(|u|,|v|) = 1; projectively a no-op.
    ApPoint normalized_scale() const;
    int recompute_stratum() const { return count_stratum(coords_); }

private:
    static int count_stratum(const std::vector<HomogCoord>& coords);
    Complex z_;
    std::vector<HomogCoord> coords_;
    int stratum_;
};

/// c_q = prod_{i<j} t_ij^{q_i q_j} for q in {0,1}^{g-1}; equals 1 when at most
/// one entry of q is set.
Complex c_coefficient(std::span<const int> q, const DegenerationModel& model);

struct PhiValue {
    Eigen::VectorXcd values;        // d entries, homogeneous up to common scale
    double err_bound = 0.0;         // certified bound from the vartheta tails
    bool base_point_witness = false; // all sections numerically zero
    double theta_scale = 0.0;       // largest |vartheta_k| over the translate set
};

/// The d sections evaluated at a point, in scale-normalized homogeneous form:
///   phi_k = sum_{q in S} c_q vartheta_k(tau_g, z + q.tau'') prod_i (q_i ? u_i : v_i).
PhiValue phi_sections(const DegenerationModel& model, const ApPoint& p, double tol,
                      const theta::EvalOptions& opt = {});

/// Applies the branch identification to every infinity coordinate (sending it
/// to 0, translating z by tau''_i and rescaling the other slots by t_ij) and
/// reduces z into the fundamental rectangle, rescaling slots along the tau_g
/// direction. Idempotent; phi is projectively invariant under it.
ApPoint glue_normalize(const DegenerationModel& model, ApPoint p);

/// The translate set {x + q.a : q in {0,1}^{g-1}} of a curve point given by a
/// lift, as reduced lifts. Throws GenericityError if two translates collide
/// within the separation floor.
std::vector<Complex> translate_set(const DegenerationModel& model, Complex x,
                                   double separation_floor = 1e-9);

struct TangentFamily {
    Eigen::MatrixXcd rows;   // (g + h + 1) x d
    double err_bound = 0.0;
    int h = 0;
    std::vector<int> zero_slots;   // slots at 0 (the reordering permutation)
    std::vector<int> finite_slots; // slots off {0, infinity}
};

/// The spanning family of the image of the differential at a normalized point:
/// row 0 the value vector, row 1 the derivative vector, then for each zero
/// slot the two (+/-) shifted vectors with their t-weights, then one restricted
/// vector per finite slot. Requires a glue-normalized point.
TangentFamily tangent_family(const DegenerationModel& model, const ApPoint& p, double tol,
                             const theta::EvalOptions& opt = {});

struct ThetaVectorFamily {
    Eigen::MatrixXcd rows; // 2^{g-h} (h+1) rows x d columns
    double err_bound = 0.0;
    bool independence_applicable = false; // rows <= d
};

/// The one-variable vector family at stratum h: values, derivatives and
/// +/- shifted values of vartheta over the restricted index range.
ThetaVectorFamily theta_vector_family(const DegenerationModel& model, Complex z, int h, double tol,
                                      const theta::EvalOptions& opt = {});

/// Assembles the full Siegel matrix with diagonal nomes t_i = t_scale and
/// compares the canonical sections against the degenerate sections over seeded
/// samples; returns the maximum componentwise deviation.
double limit_consistency(const DegenerationModel& model, double t_scale, int samples, double tol,
                         std::uint64_t seed, const theta::EvalOptions& opt = {});

} // namespace ample::degen
