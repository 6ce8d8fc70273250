#include "detail/cylinders.hpp"

#include <cmath>
#include <limits>

namespace vwak::detail {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

} // namespace

Ends Ends::of(const IntervalQ& interval)
{
    return {lower_double(interval.lo), upper_double(interval.lo), lower_double(interval.hi),
            upper_double(interval.hi)};
}

Target Target::from_exact(const IntervalQ& inner, const IntervalQ& outer)
{
    Target t;
    t.inner_ = Ends::of(inner);
    t.outer_ = Ends::of(outer);
    t.exact_ = std::make_pair(inner, outer);
    return t;
}

Target Target::ball(long long p, long long q, const Rational& radius_lo, const Rational& radius_hi,
                    double radius_lo_dn, double radius_hi_up)
{
    const double center = static_cast<double>(p) / static_cast<double>(q);
    // p and q are exact in double below 2^53; the division and the two
    // subtractions each contribute at most one rounding.
    const double err = 8 * kUnit * (std::fabs(center) + radius_hi_up) + 1e-300;
    Target t;
    t.inner_ = Ends::around(center - radius_lo_dn, center + radius_lo_dn, err);
    t.outer_ = Ends::around(center - radius_hi_up, center + radius_hi_up, err);
    t.p_ = p;
    t.q_ = q;
    t.radius_lo_ = &radius_lo;
    t.radius_hi_ = &radius_hi;
    return t;
}

void Target::build()
{
    if (!exact_) {
        Rational c(Integer(static_cast<long>(p_)), Integer(static_cast<long>(q_)));
        c.canonicalize();
        exact_ = std::make_pair(IntervalQ::open_ball(c, *radius_lo_), IntervalQ::ball(c, *radius_hi_));
    }
}

const IntervalQ& Target::exact_inner()
{
    build();
    return exact_->first;
}

const IntervalQ& Target::exact_outer()
{
    build();
    return exact_->second;
}

CylinderKernel::CylinderKernel(const Ifs1D& ifs) : ifs_(&ifs)
{
    for (const auto& m : ifs.maps()) {
        c_.push_back(to_double(m.ratio));
        b_.push_back(to_double(m.offset));
    }
    hull_lo_ = to_double(ifs.hull().lo);
    hull_hi_ = to_double(ifs.hull().hi);
    // Every b_alpha lies in [min(0, a), max(0, b)] for hull [a, b].
    scale_ = std::max(std::fabs(hull_lo_), std::fabs(hull_hi_));
    scale_ = std::nextafter(scale_ * (1 + 4 * kUnit), INFINITY);
}

Cursor CylinderKernel::cursor(const std::vector<int>& symbols) const
{
    Cursor cur;
    cur.symbols.reserve(symbols.size() + 64);
    for (int s : symbols) {
        push(cur, s);
    }
    return cur;
}

void CylinderKernel::push(Cursor& cur, int symbol) const
{
    const auto i = static_cast<std::size_t>(symbol - 1);
    if (i >= c_.size()) {
        ifs_->map(symbol); // throws
    }
    cur.b = cur.c * b_[i] + cur.b;
    cur.c = cur.c * c_[i];
    cur.symbols.push_back(symbol);
}

void CylinderKernel::pop(Cursor& cur, double c, double b) const
{
    cur.symbols.pop_back();
    cur.c = c;
    cur.b = b;
}

double CylinderKernel::error(const Cursor& cur) const
{
    const double k = static_cast<double>(cur.symbols.size());
    return 4 * scale_ * kUnit * (k * k + 6 * k + 8);
}

IntervalQ CylinderKernel::exact_cylinder(const Cursor& cur) const
{
    return compose_word(*ifs_, cur.symbols).image(ifs_->hull());
}

CylinderKernel::Relation CylinderKernel::relate(Target& target, const Cursor& cur, Outcome& out) const
{
    if (reliable(cur)) {
        const double e = error(cur);
        const double clo = lo(cur);
        const double chi = hi(cur);
        const Ends& in = target.inner();
        const Ends& ou = target.outer();

        TriBool inside = TriBool::Undecided;
        if (clo - e > in.lo_up && chi + e < in.hi_dn) {
            inside = TriBool::Yes;
        } else if (clo + e < in.lo_dn || chi - e > in.hi_up) {
            inside = TriBool::No;
        }
        TriBool apart = TriBool::Undecided;
        if (chi + e < ou.lo_dn || clo - e > ou.hi_up) {
            apart = TriBool::Yes;
        } else if (chi - e > ou.lo_up && clo + e < ou.hi_dn) {
            apart = TriBool::No;
        }
        if (inside == TriBool::Yes) {
            return Relation::Inside;
        }
        if (apart == TriBool::Yes) {
            return Relation::Apart;
        }
        if (inside == TriBool::No && apart == TriBool::No) {
            return Relation::Straddle;
        }
    }
    ++out.exact_fallbacks;
    const IntervalQ cyl = exact_cylinder(cur);
    if (target.exact_inner().contains(cyl)) {
        return Relation::Inside;
    }
    if (!target.exact_outer().intersects(cyl)) {
        return Relation::Apart;
    }
    return Relation::Straddle;
}

bool CylinderKernel::search(Target& target, int cap, Cursor& cur, Outcome& out) const
{
    ++out.nodes;
    switch (relate(target, cur, out)) {
    case Relation::Inside:
        out.certificate = cur.symbols;
        return true;
    case Relation::Apart:
        return false;
    case Relation::Straddle:
        break;
    }
    if (static_cast<int>(cur.symbols.size()) >= cap) {
        out.answer = TriBool::Undecided;
        return false;
    }
    const double c = cur.c;
    const double b = cur.b;
    for (std::size_t s = 1; s <= c_.size(); ++s) {
        push(cur, static_cast<int>(s));
        const bool found = search(target, cap, cur, out);
        pop(cur, c, b);
        if (found) {
            return true;
        }
    }
    return false;
}

Outcome CylinderKernel::classify(Target& target, int cap, Cursor& cur) const
{
    Outcome out;
    if (search(target, cap, cur, out)) {
        out.answer = TriBool::Yes;
    }
    return out;
}

} // namespace vwak::detail
