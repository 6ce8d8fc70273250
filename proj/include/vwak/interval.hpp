#pragma once

#include "vwak/rational.hpp"

#include <string>

namespace vwak {

/// Interval with exact rational endpoints and per-endpoint openness.
/// All relations are decided exactly.
struct IntervalQ {
    Rational lo;
    Rational hi;
    bool lo_open = false;
    bool hi_open = false;

    static IntervalQ closed(Rational lo, Rational hi);
    static IntervalQ open(Rational lo, Rational hi);
    /// Closed ball [center - radius, center + radius].
    static IntervalQ ball(const Rational& center, const Rational& radius);
    /// Open ball (center - radius, center + radius).
    static IntervalQ open_ball(const Rational& center, const Rational& radius);

    Rational width() const { return hi - lo; }
    bool empty() const;
    bool contains(const Rational& x) const;
    /// True iff `other` is a subset of *this. An empty `other` is contained.
    bool contains(const IntervalQ& other) const;
    bool intersects(const IntervalQ& other) const;
    /// True iff the intersection is exactly one point.
    bool touches_at_point(const IntervalQ& other) const;

    IntervalQ closure() const { return closed(lo, hi); }
    IntervalQ interior() const { return open(lo, hi); }

    friend bool operator==(const IntervalQ&, const IntervalQ&) = default;
};

/// "[lo, hi]", "(lo, hi)" etc. with num/den endpoints.
std::string to_string(const IntervalQ& interval);

/// Parses "lo,hi" as a closed interval with rational endpoints.
IntervalQ parse_interval(std::string_view text);

enum class TriBool { No, Yes, Undecided };

std::string to_string(TriBool value);

} // namespace vwak
