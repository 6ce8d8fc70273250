#pragma once

#include <cstdint>
#include <vector>

namespace vwak::detail {

/// Terms of the Farey sequence of order N (all reduced p/q with q <= N) in
/// increasing order, starting at the integer `start`.
class FareyStream {
public:
    FareyStream(std::int64_t order, std::int64_t start);

    std::int64_t p() const { return a_; }
    std::int64_t q() const { return b_; }
    void next();

private:
    std::int64_t order_;
    std::int64_t a_, b_, c_, d_;
};

/// Distinct prime factors of n >= 1.
std::vector<std::int64_t> prime_factors(std::int64_t n);

/// Number of integers in [lo, hi] coprime to n, by inclusion-exclusion over
/// the given distinct prime factors of n.
std::int64_t count_coprime(std::int64_t lo, std::int64_t hi, const std::vector<std::int64_t>& primes);

std::int64_t floor_div(std::int64_t a, std::int64_t b);

/// Smallest-prime-factor table for 0..limit.
class FactorSieve {
public:
    explicit FactorSieve(std::int64_t limit);
    std::vector<std::int64_t> primes_of(std::int64_t n) const;

private:
    std::vector<std::uint32_t> spf_;
};

} // namespace vwak::detail
