#pragma once

// Test helpers: a fixed-seed generator and brute-force oracles for the
// middle-third Cantor set that work from ternary digits rather than
// cylinder recursion.

#include "vwak/covers.hpp"
#include "vwak/ifs.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

namespace vwak::testing {

/// splitmix64.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    /// Uniform in [lo, hi].
    std::int64_t range(std::int64_t lo, std::int64_t hi)
    {
        return lo + static_cast<std::int64_t>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    /// Random rational in [0, 1] with denominator below `den`.
    Rational unit(std::int64_t den)
    {
        const std::int64_t q = range(1, den);
        return Rational(range(0, q), q);
    }

private:
    std::uint64_t state_;
};

inline Ifs1D cantor_ifs()
{
    return Ifs1D({{Rational(1, 3), Rational(0)}, {Rational(1, 3), Rational(2, 3)}});
}

/// Smallest point of the middle-third Cantor set that is >= x, for x in
/// [0, 1]. Walks the greedy ternary expansion of x until the first digit 1
/// or until the remainder repeats.
inline Rational cantor_ceil(const Rational& x)
{
    if (x <= 0) {
        return 0;
    }
    Rational rest = x;
    Rational prefix = 0;
    Rational place = 1;
    std::map<Rational, int> seen;
    for (int k = 0;; ++k) {
        if (rest == 0 || seen.count(rest)) {
            return x;
        }
        seen.emplace(rest, k);
        place /= 3;
        Rational scaled = rest * 3;
        const Integer digit = floor(scaled);
        scaled -= digit;
        if (digit == 1) {
            // x = prefix + place * (1 + scaled); 0.1 in base 3 is also 0.0222...
            if (scaled == 0) {
                return x;
            }
            return prefix + 2 * place;
        }
        prefix += Rational(digit) * place;
        rest = scaled;
    }
}

/// The closed interval [lo, hi] meets the Cantor set.
inline bool cantor_meets(const Rational& lo, const Rational& hi)
{
    if (hi < 0 || lo > 1) {
        return false;
    }
    return cantor_ceil(lo < 0 ? Rational(0) : lo) <= hi;
}

/// Cantor function F(x) = mu([0, x]) truncated after `digits` ternary digits;
/// the error is at most 2^-digits.
inline double cantor_function(const Rational& x, int digits = 60)
{
    if (x <= 0) {
        return 0.0;
    }
    if (x >= 1) {
        return 1.0;
    }
    Rational rest = x;
    double out = 0.0;
    double place = 0.5;
    for (int k = 0; k < digits; ++k) {
        rest *= 3;
        const Integer digit = floor(rest);
        rest -= digit;
        if (digit == 1) {
            return out + place;
        }
        if (digit == 2) {
            out += place;
        }
        place /= 2;
    }
    return out;
}

/// Every primitive ball of the family at level m, by a plain double loop,
/// classified against the Cantor set with the ternary oracle.
struct BruteCount {
    std::uint64_t all = 0;
    std::uint64_t meets_hi = 0;
    std::uint64_t meets_lo = 0;
};

inline BruteCount brute_cantor_count(const ApproxSpec& spec, int m, Family family)
{
    const Bracket psi = spec.at_level(m);
    const QRange range = q_range(family, m);
    BruteCount out;
    for (std::int64_t q = range.first; q < range.last; ++q) {
        const Rational r_hi = psi.hi / q;
        const Rational r_lo = psi.lo / q;
        for (std::int64_t p = -1; p <= q + 1; ++p) {
            if (std::gcd(p, q) != 1) {
                continue;
            }
            const Rational c(p, q);
            if (c + r_hi < 0 || c - r_hi > 1) {
                continue;
            }
            ++out.all;
            out.meets_hi += cantor_meets(c - r_hi, c + r_hi);
            out.meets_lo += cantor_meets(c - r_lo, c + r_lo);
        }
    }
    return out;
}

/// O(n^2) overlap check of closed upper-radius balls.
inline bool brute_disjoint(const std::vector<RationalBall>& balls)
{
    for (std::size_t i = 0; i < balls.size(); ++i) {
        for (std::size_t j = i + 1; j < balls.size(); ++j) {
            if (balls[i].closed_hi().intersects(balls[j].closed_hi())) {
                return false;
            }
        }
    }
    return true;
}

} // namespace vwak::testing
