#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace ample::theta {

using Complex = std::complex<double>;

/// Raised when a requested tolerance cannot be certified within the allowed
/// summation box (imaginary part too small, tolerance too tight, ...).
class CertificationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when every section vanishes at the evaluation point.
class AllSectionsVanishError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline Complex e_of(Complex z) { return std::exp(Complex(0.0, 6.283185307179586477) * z); }

/// A point of the degree-g Siegel space together with a polarization degree d:
/// a complex symmetric g x g matrix with positive-definite imaginary part.
class SiegelPoint {
public:
    SiegelPoint(Eigen::MatrixXcd tau, int d);

    int g() const { return static_cast<int>(tau_.rows()); }
    int d() const { return d_; }
    const Eigen::MatrixXcd& tau() const { return tau_; }
    Complex entry(int i, int j) const { return tau_(i, j); }
    const Eigen::MatrixXd& imag() const { return imag_; }
    double imag_min_eigenvalue() const { return lambda_min_; }

private:
    Eigen::MatrixXcd tau_;
    int d_;
    Eigen::MatrixXd imag_;
    double lambda_min_;
};

/// A certified series value: |true value - value| <= tail_bound, with the
/// summation taken over the integer box of half-width `radius`.
struct ThetaValue {
    Complex value{};
    double tail_bound = 0.0;
    int radius = 0;
};

struct EvalOptions {
    double eig_floor = 0.05; // refuse when the smallest eigenvalue of Im tau is below this
    int max_radius = 64;     // refuse rather than grow the box beyond this
    int min_radius = 1;      // force at least this box (tail re-certification checks)
};

/// Lattice theta series with real characteristic m:
///   theta_{m,0}(tau, z) = sum_{q in Z^g} e( (q+m) tau (q+m)^T / 2 + (q+m).z ).
/// The summation box is centered on the dominant term and grown until the
/// shell-count times largest-shell-term bound certifies `tol`.
ThetaValue theta_g(const SiegelPoint& tau, const Eigen::VectorXcd& z, const Eigen::VectorXd& m,
                   double tol, const EvalOptions& opt = {});

/// One-variable family on the degree-d elliptic curve:
///   vartheta_k(tau, z) = sum_{q in Z} e( (q+k/d)^2 tau / 2 + (q+k/d) z ),
/// with deriv = 1 differentiating term-wise in z. k is reduced mod d.
ThetaValue vartheta(Complex tau_g, Complex z, int k, int d, double tol, int deriv = 0,
                    const EvalOptions& opt = {});

/// The k-th canonical section: theta_{kr,0}(tau, z + s(tau)) with
/// r = (0,...,0,1/d) and s(tau) = (-tau_11/2, ..., -tau_{g-1,g-1}/2, 0).
ThetaValue theta_k_section(const SiegelPoint& tau, const Eigen::VectorXcd& z, int k, double tol,
                           const EvalOptions& opt = {});

/// Absolute difference between theta_k and its separated-variable expansion
///   sum_{|q|<=Q, q in Z^{g-1}} c_q(tau') vartheta_k(tau_g, z_g + q.tau'')
///        prod_i t_i^{q_i(q_i-1)/2} w_i^{q_i},
/// where t_i = e(tau_ii), w_i = e(z_i) and c_q = prod_{i<j<g} e(tau_ij)^{q_i q_j}.
double factorization_residual(const SiegelPoint& tau, const Eigen::VectorXcd& z, int k, int box_q,
                              double tol, const EvalOptions& opt = {});

struct AutomorphyRatio {
    Complex ratio{};          // ratio at the best-conditioned section
    double spread = 0.0;      // max pairwise difference across sections
    double error_budget = 0.0; // propagated certified bounds on the ratios
    int sections_used = 0;
};

/// Ratio theta_k(tau, z + lambda) / theta_k(tau, z) for the period-lattice row
/// `row` in 1..2g (rows of tau first, then the rows of diag(1,...,1,d)).
/// The ratio must be independent of k; the spread across k measures that.
AutomorphyRatio automorphy_ratio(const SiegelPoint& tau, const Eigen::VectorXcd& z, int row,
                                 double tol, const EvalOptions& opt = {});

} // namespace ample::theta
