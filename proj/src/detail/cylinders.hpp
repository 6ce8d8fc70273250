#pragma once

// Double-filtered cylinder walking. Each node carries f_alpha as a pair of
// doubles together with an a-priori bound on their rounding error; a
// comparison that the bound cannot settle is redone exactly by composing the
// word in rationals. Results are therefore identical to a purely rational
// walk, only faster.

#include "vwak/ifs.hpp"

#include <optional>
#include <vector>

namespace vwak::detail {

/// Directed-rounding brackets of an interval's two endpoints.
struct Ends {
    double lo_dn = 0, lo_up = 0, hi_dn = 0, hi_up = 0;

    static Ends of(const IntervalQ& interval);
    /// Endpoints known only to within +-err of lo and hi.
    static Ends around(double lo, double hi, double err) { return {lo - err, lo + err, hi - err, hi + err}; }
};

/// A query pair: cylinders inside `inner` count as hits, cylinders disjoint
/// from `outer` are pruned. inner must be a subset of outer.
class Target {
public:
    static Target from_exact(const IntervalQ& inner, const IntervalQ& outer);
    /// Open ball of radius lo (inner) and closed ball of radius hi (outer)
    /// around p/q.
    static Target ball(long long p, long long q, const Rational& radius_lo, const Rational& radius_hi,
                       double radius_lo_dn, double radius_hi_up);

    const Ends& inner() const { return inner_; }
    const Ends& outer() const { return outer_; }
    const IntervalQ& exact_inner();
    const IntervalQ& exact_outer();

private:
    void build();

    Ends inner_;
    Ends outer_;
    // Ball description used to build the exact pair on demand.
    long long p_ = 0;
    long long q_ = 1;
    const Rational* radius_lo_ = nullptr;
    const Rational* radius_hi_ = nullptr;
    std::optional<std::pair<IntervalQ, IntervalQ>> exact_;
};

struct Cursor {
    double c = 1.0;
    double b = 0.0;
    std::vector<int> symbols;
};

struct Outcome {
    TriBool answer = TriBool::No;
    std::vector<int> certificate;
    std::size_t nodes = 0;
    std::size_t exact_fallbacks = 0;
};

class CylinderKernel {
public:
    explicit CylinderKernel(const Ifs1D& ifs);

    const Ifs1D& ifs() const { return *ifs_; }
    std::size_t arity() const { return c_.size(); }

    Cursor cursor(const std::vector<int>& symbols) const;
    void push(Cursor& cur, int symbol) const;
    void pop(Cursor& cur, double c, double b) const;

    /// Cylinder endpoints in double and their absolute error bound.
    double lo(const Cursor& cur) const { return cur.c * hull_lo_ + cur.b; }
    double hi(const Cursor& cur) const { return cur.c * hull_hi_ + cur.b; }
    double error(const Cursor& cur) const;
    bool reliable(const Cursor& cur) const { return cur.c > 1e-280; }

    /// Exact cylinder f_alpha(hull) for the cursor's word.
    IntervalQ exact_cylinder(const Cursor& cur) const;

    /// Depth-first search below `cur` (restored on return) up to absolute
    /// word length `cap`. Yes carries the first hit in preorder.
    Outcome classify(Target& target, int cap, Cursor& cur) const;

private:
    enum class Relation { Inside, Apart, Straddle };
    Relation relate(Target& target, const Cursor& cur, Outcome& out) const;
    bool search(Target& target, int cap, Cursor& cur, Outcome& out) const;

    const Ifs1D* ifs_;
    std::vector<double> c_;
    std::vector<double> b_;
    double hull_lo_;
    double hull_hi_;
    double scale_;
};

} // namespace vwak::detail
