#pragma once

#include <functional>
#include <span>
#include <vector>

namespace ample {

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Deterministic Nelder-Mead simplex descent. Stops after max_iter iterations
/// or when the simplex value spread drops below value_tol.
SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                          std::span<const double> start, double initial_step, int max_iter,
                          double value_tol);

} // namespace ample
