#include "vwak/interval.hpp"

#include <stdexcept>

namespace vwak {

IntervalQ IntervalQ::closed(Rational lo, Rational hi)
{
    return IntervalQ{std::move(lo), std::move(hi), false, false};
}

IntervalQ IntervalQ::open(Rational lo, Rational hi)
{
    return IntervalQ{std::move(lo), std::move(hi), true, true};
}

IntervalQ IntervalQ::ball(const Rational& center, const Rational& radius)
{
    return closed(center - radius, center + radius);
}

IntervalQ IntervalQ::open_ball(const Rational& center, const Rational& radius)
{
    return open(center - radius, center + radius);
}

bool IntervalQ::empty() const
{
    if (lo > hi) {
        return true;
    }
    return lo == hi && (lo_open || hi_open);
}

bool IntervalQ::contains(const Rational& x) const
{
    const bool above = lo_open ? x > lo : x >= lo;
    const bool below = hi_open ? x < hi : x <= hi;
    return above && below;
}

bool IntervalQ::contains(const IntervalQ& other) const
{
    if (other.empty()) {
        return true;
    }
    const bool lower_ok = lo < other.lo || (lo == other.lo && (!lo_open || other.lo_open));
    const bool upper_ok = other.hi < hi || (other.hi == hi && (!hi_open || other.hi_open));
    return lower_ok && upper_ok;
}

bool IntervalQ::intersects(const IntervalQ& other) const
{
    if (empty() || other.empty()) {
        return false;
    }
    // Separated on the right of *this?
    if (hi < other.lo || (hi == other.lo && (hi_open || other.lo_open))) {
        return false;
    }
    if (other.hi < lo || (other.hi == lo && (other.hi_open || lo_open))) {
        return false;
    }
    return true;
}

bool IntervalQ::touches_at_point(const IntervalQ& other) const
{
    if (!intersects(other)) {
        return false;
    }
    return hi == other.lo || other.hi == lo || (lo == hi) || (other.lo == other.hi);
}

std::string to_string(const IntervalQ& interval)
{
    return std::string(interval.lo_open ? "(" : "[") + to_string(interval.lo) + ", " + to_string(interval.hi) +
           (interval.hi_open ? ")" : "]");
}

IntervalQ parse_interval(std::string_view text)
{
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) {
        throw std::invalid_argument("interval must be 'lo,hi': '" + std::string(text) + "'");
    }
    IntervalQ out = IntervalQ::closed(parse_rational(text.substr(0, comma)), parse_rational(text.substr(comma + 1)));
    if (out.lo > out.hi) {
        throw std::invalid_argument("interval lower end exceeds upper end: '" + std::string(text) + "'");
    }
    return out;
}

std::string to_string(TriBool value)
{
    switch (value) {
    case TriBool::No:
        return "no";
    case TriBool::Yes:
        return "yes";
    case TriBool::Undecided:
        return "undecided";
    }
    return "undecided";
}

} // namespace vwak
