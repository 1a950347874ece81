#include "ample/rng.hpp"

namespace ample {

LowDiscrepancy::LowDiscrepancy(int dim, std::uint64_t seed) {
    // Roots of x^{dim+1} = x + 1 give the multiplier family; computed by
    // fixed-point iteration, then alpha_c = phi^{-(c+1)} mod 1.
    double phi = 2.0;
    for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
    alpha_.resize(static_cast<std::size_t>(dim));
    shift_.resize(static_cast<std::size_t>(dim));
    Rng r = Rng::stream(seed, 0x1d);
    double p = 1.0;
    for (int c = 0; c < dim; ++c) {
        p /= phi;
        alpha_[static_cast<std::size_t>(c)] = p - std::floor(p);
        shift_[static_cast<std::size_t>(c)] = r.next_double();
    }
}

double LowDiscrepancy::point(long n, int c) const {
    const double x = shift_[static_cast<std::size_t>(c)] +
                     alpha_[static_cast<std::size_t>(c)] * static_cast<double>(n + 1);
    return x - std::floor(x);
}

} // namespace ample
