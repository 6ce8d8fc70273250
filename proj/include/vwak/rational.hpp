#pragma once

// Exact rational arithmetic on top of GMP, plus the handful of helpers the
// rest of the library needs: "num/den" parsing, floor/ceil, powers of two,
// and certified rational brackets for q^(-v) with rational v.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace vwak {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "num/den", "num" or "-num/den". Throws std::invalid_argument on
/// malformed input or a zero denominator. The result is canonicalized.
Rational parse_rational(std::string_view text);

/// Canonical "num/den" rendering; integers render as "num/1".
std::string to_string(const Rational& value);

Integer floor(const Rational& value);
Integer ceil(const Rational& value);

/// 2^e for any integer e.
Rational pow2(long e);

/// Nearest-ish double (truncating, as GMP does).
double to_double(const Rational& value);
/// Largest double that is <= value.
double lower_double(const Rational& value);
/// Smallest double that is >= value.
double upper_double(const Rational& value);

/// log2(value) for value > 0, accurate even far outside double range.
double log2_of(const Rational& value);

/// A pair of rationals lo <= x <= hi bracketing some real x.
struct Bracket {
    Rational lo;
    Rational hi;

    bool exact() const { return lo == hi; }
    double mid() const { return 0.5 * (to_double(lo) + to_double(hi)); }
};

/// Bracket of base^(-exponent) for integer base >= 1 and rational exponent
/// >= 0. Relative width is below 2^-64; the bracket collapses to a point
/// whenever the value is an exact dyadic rational.
Bracket inverse_power(const Integer& base, const Rational& exponent);

/// Bracket of 2^(-exponent) for rational exponent (any sign).
Bracket inverse_power_of_two(const Rational& exponent);

} // namespace vwak
