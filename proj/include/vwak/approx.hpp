#pragma once

// Approximation functions psi evaluated at dyadic arguments 2^m.

#include "vwak/rational.hpp"

#include <map>
#include <string>

namespace vwak {

class ApproxSpec {
public:
    enum class Kind { PowerLaw, Table };

    /// psi(q) = scale * q^(-v), v > 0.
    static ApproxSpec power_law(const Rational& v, const Rational& scale = 1);
    /// psi(2^m) = scale * values[m]. Values must be non-negative and
    /// non-increasing in m. Throws std::invalid_argument otherwise.
    static ApproxSpec table(std::map<int, Rational> values, const Rational& scale = 1);

    Kind kind() const { return kind_; }
    const Rational& exponent() const { return v_; }
    const Rational& scale() const { return scale_; }
    const std::map<int, Rational>& values() const { return values_; }

    /// Same function with the multiplier replaced by scale * factor.
    ApproxSpec scaled(const Rational& factor) const;

    /// Bracket of psi(2^m). Exact whenever the value is rational.
    /// Throws std::out_of_range for a table without an entry at m.
    Bracket at_level(int m) const;

    std::string describe() const;

private:
    Kind kind_ = Kind::PowerLaw;
    Rational v_{1};
    Rational scale_{1};
    std::map<int, Rational> values_;
};

} // namespace vwak
