#include "detail/farey.hpp"

#include <stdexcept>

namespace vwak::detail {

FareyStream::FareyStream(std::int64_t order, std::int64_t start)
    : order_(order), a_(start), b_(1), c_(start * order + 1), d_(order)
{
    if (order < 1) {
        throw std::invalid_argument("Farey order must be >= 1");
    }
}

void FareyStream::next()
{
    const std::int64_t k = (order_ + b_) / d_;
    const std::int64_t e = k * c_ - a_;
    const std::int64_t f = k * d_ - b_;
    a_ = c_;
    b_ = d_;
    c_ = e;
    d_ = f;
}

std::vector<std::int64_t> prime_factors(std::int64_t n)
{
    std::vector<std::int64_t> out;
    for (std::int64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) {
                n /= d;
            }
        }
    }
    if (n > 1) {
        out.push_back(n);
    }
    return out;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) {
        --q;
    }
    return q;
}

std::int64_t count_coprime(std::int64_t lo, std::int64_t hi, const std::vector<std::int64_t>& primes)
{
    if (hi < lo) {
        return 0;
    }
    std::int64_t total = 0;
    const std::size_t subsets = std::size_t{1} << primes.size();
    for (std::size_t mask = 0; mask < subsets; ++mask) {
        std::int64_t d = 1;
        int sign = 1;
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if (mask & (std::size_t{1} << i)) {
                d *= primes[i];
                sign = -sign;
            }
        }
        total += sign * (floor_div(hi, d) - floor_div(lo - 1, d));
    }
    return total;
}

FactorSieve::FactorSieve(std::int64_t limit) : spf_(static_cast<std::size_t>(limit + 1), 0)
{
    for (std::int64_t i = 2; i <= limit; ++i) {
        if (spf_[static_cast<std::size_t>(i)] == 0) {
            for (std::int64_t j = i; j <= limit; j += i) {
                if (spf_[static_cast<std::size_t>(j)] == 0) {
                    spf_[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
                }
            }
        }
    }
}

std::vector<std::int64_t> FactorSieve::primes_of(std::int64_t n) const
{
    if (n < 0 || static_cast<std::size_t>(n) >= spf_.size()) {
        return prime_factors(n);
    }
    std::vector<std::int64_t> out;
    while (n > 1) {
        const std::int64_t p = spf_[static_cast<std::size_t>(n)];
        out.push_back(p);
        while (n % p == 0) {
            n /= p;
        }
    }
    return out;
}

} // namespace vwak::detail
