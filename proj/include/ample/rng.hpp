#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ample {

/// Deterministic splittable generator (splitmix64 core). A root seed plus a
/// stream index fully determine the sequence, so work farmed out per restart
/// reproduces bit-identically regardless of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ kGolden) {}

    static Rng stream(std::uint64_t root_seed, std::uint64_t stream_id) {
        Rng r(root_seed);
        r.state_ += kGolden * (stream_id + 1);
        r.next_u64();
        return r;
    }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += kGolden);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    double gaussian() {
        // Box-Muller; one value per call keeps the stream position simple.
        double u1 = next_double(), u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

/// Additive-recurrence low-discrepancy sequence on [0,1)^dim (generalized
/// golden-ratio multipliers), offset by a seeded shift.
class LowDiscrepancy {
public:
    LowDiscrepancy(int dim, std::uint64_t seed);
    /// Point #n of the sequence, component c.
    double point(long n, int c) const;
    int dim() const { return static_cast<int>(alpha_.size()); }

private:
    std::vector<double> alpha_;
    std::vector<double> shift_;
};

/// Neumaier-compensated accumulator for long real sums.
struct KahanSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

} // namespace ample
