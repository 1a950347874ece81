#include "ample/theta.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ample/rng.hpp"

namespace ample::theta {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 6.28318530717958647692;

// Upper bound on the terms omitted outside box half-width R:
//   sum_{s > R} count(s) * peak * weight(s) * exp(-pi * lam * (s - 1/2)^2).
// The summand ratio is decreasing in s, so once it drops below 0.9 the rest is
// dominated by a geometric series.
double shell_tail(int radius, int g, double lam, double peak, double deriv_weight_base) {
    auto shell_term = [&](int s) {
        const double count = std::pow(2.0 * s + 1.0, g) - std::pow(2.0 * s - 1.0, g);
        const double weight =
            deriv_weight_base < 0 ? 1.0 : kTwoPi * (deriv_weight_base + s + 0.5);
        const double dist = s - 0.5;
        return count * weight * peak * std::exp(-kPi * lam * dist * dist);
    };
    double tail = 0.0;
    double a = shell_term(radius + 1);
    for (int s = radius + 1;; ++s) {
        if (a == 0.0) return tail;
        const double a_next = shell_term(s + 1);
        const double rho = a_next / a;
        if (rho < 0.9) return tail + a + a_next / (1.0 - rho);
        tail += a;
        a = a_next;
        if (s > radius + 100000) return std::numeric_limits<double>::infinity();
    }
}

int certify_radius(int g, double lam, double peak, double tol, const EvalOptions& opt,
                   double deriv_weight_base, double* tail_out) {
    for (int radius = std::max(1, opt.min_radius); radius <= opt.max_radius; ++radius) {
        const double tail = shell_tail(radius, g, lam, peak, deriv_weight_base);
        if (tail <= 0.5 * tol) {
            *tail_out = tail;
            return radius;
        }
    }
    throw CertificationError("theta: cannot certify requested tolerance within the radius cap");
}

struct ComplexKahan {
    KahanSum re, im;
    void add(Complex c) {
        re.add(c.real());
        im.add(c.imag());
    }
    Complex value() const { return {re.value(), im.value()}; }
};

} // namespace

SiegelPoint::SiegelPoint(Eigen::MatrixXcd tau, int d) : tau_(std::move(tau)), d_(d) {
    if (tau_.rows() != tau_.cols() || tau_.rows() < 1)
        throw std::invalid_argument("SiegelPoint: tau must be square and nonempty");
    if (d_ < 1) throw std::invalid_argument("SiegelPoint: d must be >= 1");
    const double scale = std::max(1.0, tau_.cwiseAbs().maxCoeff());
    if ((tau_ - tau_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("SiegelPoint: tau must be symmetric");
    tau_ = ((tau_ + tau_.transpose()) / 2.0).eval();
    imag_ = tau_.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(imag_, Eigen::EigenvaluesOnly);
    lambda_min_ = es.eigenvalues().minCoeff();
    if (lambda_min_ <= 0.0)
        throw std::invalid_argument("SiegelPoint: Im(tau) must be positive definite");
}

ThetaValue theta_g(const SiegelPoint& tau, const Eigen::VectorXcd& z, const Eigen::VectorXd& m,
                   double tol, const EvalOptions& opt) {
    const int g = tau.g();
    if (z.size() != g || m.size() != g) throw std::invalid_argument("theta_g: dimension mismatch");
    if (!(tol > 0.0)) throw std::invalid_argument("theta_g: tol must be positive");
    const double lam = tau.imag_min_eigenvalue();
    if (lam < opt.eig_floor)
        throw CertificationError("theta_g: smallest eigenvalue of Im(tau) is below the floor");

    const Eigen::VectorXd b = z.imag();
    const Eigen::VectorXd n_star = -tau.imag().ldlt().solve(b);
    Eigen::VectorXd center(g);
    for (int i = 0; i < g; ++i) center[i] = std::round(n_star[i] - m[i]);
    const double peak = std::exp(kPi * n_star.dot(tau.imag() * n_star));

    double tail = 0.0;
    const int radius = certify_radius(g, lam, peak, tol, opt, -1.0, &tail);

    const int width = 2 * radius + 1;
    std::vector<int> idx(static_cast<std::size_t>(g), 0);
    Eigen::VectorXd n(g);
    ComplexKahan acc;
    for (;;) {
        for (int i = 0; i < g; ++i) n[i] = center[i] - radius + idx[static_cast<std::size_t>(i)] + m[i];
        Complex phase = 0.0;
        for (int i = 0; i < g; ++i) {
            Complex row = 0.0;
            for (int j = 0; j < g; ++j) row += tau.entry(i, j) * n[j];
            phase += n[i] * (0.5 * row + z[i]);
        }
        acc.add(std::exp(Complex(0.0, kTwoPi) * phase));
        int carry = 0;
        while (carry < g && ++idx[static_cast<std::size_t>(carry)] == width) {
            idx[static_cast<std::size_t>(carry)] = 0;
            ++carry;
        }
        if (carry == g) break;
    }
    return ThetaValue{acc.value(), tail, radius};
}

ThetaValue vartheta(Complex tau_g, Complex z, int k, int d, double tol, int deriv,
                    const EvalOptions& opt) {
    if (d < 1) throw std::invalid_argument("vartheta: d must be >= 1");
    if (!(tol > 0.0)) throw std::invalid_argument("vartheta: tol must be positive");
    if (deriv != 0 && deriv != 1) throw std::invalid_argument("vartheta: deriv must be 0 or 1");
    const double y = tau_g.imag();
    if (y < opt.eig_floor)
        throw CertificationError("vartheta: Im(tau) is below the eigenvalue floor");
    k = ((k % d) + d) % d;
    const double m = static_cast<double>(k) / d;

    const double b = z.imag();
    const double n_star = -b / y;
    const double center = std::round(n_star - m);
    const double peak = std::exp(kPi * y * n_star * n_star);

    double tail = 0.0;
    const int radius =
        certify_radius(1, y, peak, tol, opt, deriv ? std::abs(n_star) : -1.0, &tail);

    ComplexKahan acc;
    for (int off = -radius; off <= radius; ++off) {
        const double n = center + off + m;
        Complex term = std::exp(Complex(0.0, kTwoPi) * (0.5 * n * n * tau_g + n * z));
        if (deriv) term *= Complex(0.0, kTwoPi) * n;
        acc.add(term);
    }
    return ThetaValue{acc.value(), tail, radius};
}

ThetaValue theta_k_section(const SiegelPoint& tau, const Eigen::VectorXcd& z, int k, double tol,
                           const EvalOptions& opt) {
    const int g = tau.g();
    if (z.size() != g) throw std::invalid_argument("theta_k_section: dimension mismatch");
    const int d = tau.d();
    k = ((k % d) + d) % d;
    Eigen::VectorXd m = Eigen::VectorXd::Zero(g);
    m[g - 1] = static_cast<double>(k) / d;
    Eigen::VectorXcd shifted = z;
    for (int i = 0; i + 1 < g; ++i) shifted[i] -= 0.5 * tau.entry(i, i);
    return theta_g(tau, shifted, m, tol, opt);
}

double factorization_residual(const SiegelPoint& tau, const Eigen::VectorXcd& z, int k, int box_q,
                              double tol, const EvalOptions& opt) {
    const int g = tau.g();
    if (z.size() != g) throw std::invalid_argument("factorization_residual: dimension mismatch");
    if (box_q < 0) throw std::invalid_argument("factorization_residual: box radius must be >= 0");
    const int d = tau.d();

    const Complex lhs = theta_k_section(tau, z, k, tol, opt).value;

    const Complex tau_last = tau.entry(g - 1, g - 1);
    const int dims = g - 1;
    const int width = 2 * box_q + 1;
    std::vector<int> idx(static_cast<std::size_t>(std::max(dims, 1)), 0);
    ComplexKahan rhs;
    for (;;) {
        Complex phase = 0.0;
        Complex arg = z[g - 1];
        for (int i = 0; i < dims; ++i) {
            const long long qi = idx[static_cast<std::size_t>(i)] - box_q;
            // integer t-exponents by construction of the shift
            if ((qi * (qi - 1)) % 2 != 0)
                throw std::logic_error("factorization_residual: non-integer exponent");
            phase += tau.entry(i, i) * static_cast<double>(qi * (qi - 1) / 2);
            phase += z[i] * static_cast<double>(qi);
            for (int j = i + 1; j < dims; ++j)
                phase += tau.entry(i, j) *
                         static_cast<double>(qi * (idx[static_cast<std::size_t>(j)] - box_q));
            arg += tau.entry(i, g - 1) * static_cast<double>(qi);
        }
        const Complex coeff = e_of(phase);
        const ThetaValue vt = vartheta(tau_last, arg, k, d, tol, 0, opt);
        rhs.add(coeff * vt.value);
        if (dims == 0) break;
        int carry = 0;
        while (carry < dims && ++idx[static_cast<std::size_t>(carry)] == width) {
            idx[static_cast<std::size_t>(carry)] = 0;
            ++carry;
        }
        if (carry == dims) break;
    }
    return std::abs(lhs - rhs.value());
}

AutomorphyRatio automorphy_ratio(const SiegelPoint& tau, const Eigen::VectorXcd& z, int row,
                                 double tol, const EvalOptions& opt) {
    const int g = tau.g();
    const int d = tau.d();
    if (z.size() != g) throw std::invalid_argument("automorphy_ratio: dimension mismatch");
    if (row < 1 || row > 2 * g) throw std::invalid_argument("automorphy_ratio: row must be in 1..2g");

    Eigen::VectorXcd lambda = Eigen::VectorXcd::Zero(g);
    if (row <= g) {
        for (int j = 0; j < g; ++j) lambda[j] = tau.entry(row - 1, j);
    } else {
        const int j = row - g - 1;
        lambda[j] = (j == g - 1) ? static_cast<double>(d) : 1.0;
    }
    const Eigen::VectorXcd z_shift = z + lambda;

    std::vector<Complex> ratios;
    std::vector<double> budgets;
    double max_den = 0.0;
    std::vector<ThetaValue> nums(static_cast<std::size_t>(d)), dens(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        nums[static_cast<std::size_t>(k)] = theta_k_section(tau, z_shift, k, tol, opt);
        dens[static_cast<std::size_t>(k)] = theta_k_section(tau, z, k, tol, opt);
        max_den = std::max(max_den, std::abs(dens[static_cast<std::size_t>(k)].value));
    }
    if (max_den == 0.0) throw AllSectionsVanishError("automorphy_ratio: all sections vanish at z");

    Complex best_ratio = 0.0;
    double best_den = -1.0;
    for (int k = 0; k < d; ++k) {
        const auto& den = dens[static_cast<std::size_t>(k)];
        const double mag = std::abs(den.value);
        if (mag <= std::max(10.0 * den.tail_bound, 1e-8 * max_den)) continue;
        const auto& num = nums[static_cast<std::size_t>(k)];
        const Complex r = num.value / den.value;
        ratios.push_back(r);
        budgets.push_back((num.tail_bound + std::abs(r) * den.tail_bound) / mag);
        if (mag > best_den) {
            best_den = mag;
            best_ratio = r;
        }
    }
    if (ratios.empty()) throw AllSectionsVanishError("automorphy_ratio: all sections vanish at z");
    if (d >= 2 && ratios.size() < 2)
        throw AllSectionsVanishError("automorphy_ratio: fewer than two nonvanishing sections");

    double spread = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i)
        for (std::size_t j = i + 1; j < ratios.size(); ++j)
            spread = std::max(spread, std::abs(ratios[i] - ratios[j]));
    double budget = 0.0;
    for (double bnd : budgets) budget = std::max(budget, bnd);

    return AutomorphyRatio{best_ratio, spread, 2.0 * budget, static_cast<int>(ratios.size())};
}

} // namespace ample::theta
