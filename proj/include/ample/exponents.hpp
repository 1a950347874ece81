#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ample::lattice {

// Overflow-checked 64-bit arithmetic. The exponent algebra below is exact by
// contract; an overflow is a hard error, never a wrap.
inline long long checked_mul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r))
        throw std::overflow_error("exponent arithmetic overflow (mul)");
    return r;
}

inline long long checked_add(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r))
        throw std::overflow_error("exponent arithmetic overflow (add)");
    return r;
}

/// A sign vector in {-1,0,+1}^g whose entries are all >= 0 or all <= 0.
class StarVector {
public:
    explicit StarVector(std::vector<int> entries) : entries_(std::move(entries)) {
        if (!is_valid(entries_))
            throw std::invalid_argument("StarVector: entries must be in {-1,0,1} and share a sign");
    }

    static bool is_valid(std::span<const int> e) {
        if (e.empty()) return false;
        bool has_pos = false, has_neg = false;
        for (int v : e) {
            if (v < -1 || v > 1) return false;
            has_pos |= (v > 0);
            has_neg |= (v < 0);
        }
        return !(has_pos && has_neg);
    }

    int size() const { return static_cast<int>(entries_.size()); }
    int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& entries() const { return entries_; }
    bool nonnegative() const {
        for (int v : entries_)
            if (v < 0) return false;
        return true;
    }
    bool operator==(const StarVector&) const = default;

private:
    std::vector<int> entries_;
};

/// Integer exponent vector over the formal variables {T_ij : i<=j} and {w_i}.
/// Pairs are stored symmetrically: t(i,j) and t(j,i) address the same slot.
/// Indices are 0-based in code; serialized forms are 1-based.
class MonomialExponents {
public:
    explicit MonomialExponents(int g)
        : g_(g), t_(static_cast<std::size_t>(g) * (g + 1) / 2, 0), w_(static_cast<std::size_t>(g), 0) {
        if (g < 1) throw std::invalid_argument("MonomialExponents: g must be >= 1");
    }

    int g() const { return g_; }

    long long t(int i, int j) const { return t_[pair_index(i, j)]; }
    void set_t(int i, int j, long long v) { t_[pair_index(i, j)] = v; }
    void add_t(int i, int j, long long v) {
        auto& slot = t_[pair_index(i, j)];
        slot = checked_add(slot, v);
    }

    long long w(int i) const { return w_[check_index(i)]; }
    void set_w(int i, long long v) { w_[check_index(i)] = v; }

    bool t_all_nonneg() const {
        for (long long v : t_)
            if (v < 0) return false;
        return true;
    }
    bool zero() const {
        for (long long v : t_)
            if (v != 0) return false;
        for (long long v : w_)
            if (v != 0) return false;
        return true;
    }
    void clear() {
        t_.assign(t_.size(), 0);
        w_.assign(w_.size(), 0);
    }

    std::span<const long long> t_data() const { return t_; }
    std::span<const long long> w_data() const { return w_; }

    // Row-major upper-triangular layout; shared with the toroidal matrices.
    std::size_t pair_index(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i < 0 || j >= g_) throw std::out_of_range("MonomialExponents: pair index out of range");
        return static_cast<std::size_t>(i) * g_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
               static_cast<std::size_t>(j - i);
    }

    bool operator==(const MonomialExponents&) const = default;

private:
    std::size_t check_index(int i) const {
        if (i < 0 || i >= g_) throw std::out_of_range("MonomialExponents: index out of range");
        return static_cast<std::size_t>(i);
    }

    int g_;
    std::vector<long long> t_;
    std::vector<long long> w_;
};

} // namespace ample::lattice
