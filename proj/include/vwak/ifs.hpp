#pragma once

// Iterated function systems of contracting similarities x -> c x + b on the
// line, their symbolic coding, and the exact geometry of cylinders.
//
// Symbols are 1-based throughout (1..l), matching the usual notation for
// words over the alphabet {1, ..., l}. Maps are stored sorted by ascending
// ratio, so symbol 1 always carries the smallest contraction ratio.

#include "vwak/interval.hpp"
#include "vwak/rational.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vwak {

/// x -> ratio * x + offset.
struct Affine1D {
    Rational ratio{1};
    Rational offset{0};

    /// (*this) o inner, i.e. x -> ratio * inner(x) + offset.
    Affine1D compose(const Affine1D& inner) const;
    Rational operator()(const Rational& x) const { return ratio * x + offset; }
    Rational inverse(const Rational& y) const { return (y - offset) / ratio; }
    /// Image of an interval; ratio must be positive.
    IntervalQ image(const IntervalQ& interval) const;
    IntervalQ preimage(const IntervalQ& interval) const;
    Rational fixed_point() const { return offset / (1 - ratio); }

    friend bool operator==(const Affine1D&, const Affine1D&) = default;
};

class Ifs1D {
public:
    /// Validates 0 < c < 1 for every map and sorts by (ratio, offset).
    /// Throws std::invalid_argument on an empty list or a bad ratio.
    explicit Ifs1D(std::vector<Affine1D> maps);

    std::size_t size() const { return maps_.size(); }
    const std::vector<Affine1D>& maps() const { return maps_; }
    /// 1-based symbol lookup.
    const Affine1D& map(int symbol) const;

    const Rational& min_ratio() const { return maps_.front().ratio; }
    const Rational& max_ratio() const { return max_ratio_; }

    /// Convex hull of the attractor, computed once at construction.
    const IntervalQ& hull() const { return hull_; }
    Rational diameter() const { return hull_.hi - hull_.lo; }

private:
    std::vector<Affine1D> maps_;
    Rational max_ratio_;
    IntervalQ hull_;
};

/// Finite word over {1..l} together with its composed map f_w.
class Word {
public:
    Word() = default;
    /// Validates every symbol against the IFS. Throws std::out_of_range.
    Word(const Ifs1D& ifs, std::vector<int> symbols);

    const std::vector<int>& symbols() const { return symbols_; }
    std::size_t length() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    const Affine1D& map() const { return map_; }
    const Rational& ratio() const { return map_.ratio; }

    Word extended(const Ifs1D& ifs, int symbol) const;
    /// First n symbols.
    Word truncated(const Ifs1D& ifs, std::size_t n) const;

    /// Comma-separated symbols, "" for the empty word.
    std::string str() const;
    static Word parse(const Ifs1D& ifs, std::string_view text);

    friend bool operator==(const Word& a, const Word& b) { return a.symbols_ == b.symbols_; }

private:
    std::vector<int> symbols_;
    Affine1D map_;
};

/// a is a prefix of b (a == b allowed).
bool is_prefix(const Word& a, const Word& b);
/// a is a proper prefix of b.
bool is_strict_prefix(const Word& a, const Word& b);

struct DimensionBracket {
    double lo = 0.0;
    double hi = 0.0;
    double value() const { return 0.5 * (lo + hi); }
};

/// Root s of sum_i c_i^s = 1, by bisection. The returned bracket contains
/// the floating-point root and has width at most tol.
DimensionBracket solve_dimension_bracket(const Ifs1D& ifs, double tol = 1e-15);
double solve_dimension(const Ifs1D& ifs, double tol = 1e-15);

/// f_w for the given 1-based symbols. Throws std::out_of_range.
Affine1D compose_word(const Ifs1D& ifs, std::span<const int> symbols);

IntervalQ attractor_hull(const Ifs1D& ifs);

/// f_i(U) subset of U for all i and pairwise disjoint images, with U taken as
/// the open interval (open_set.lo, open_set.hi).
bool check_osc(const Ifs1D& ifs, const IntervalQ& open_set);
/// Uses the interior of the attractor hull as the witness open set.
bool check_osc(const Ifs1D& ifs);

/// Cylinder f_w(hull), which contains pi(w omega) for every tail omega.
IntervalQ code_point(const Ifs1D& ifs, const Word& prefix);

struct AttractorQuery {
    TriBool answer = TriBool::Undecided;
    /// For Yes: a word whose cylinder lies inside the target.
    std::optional<Word> certificate;
    int max_depth = 0;
    std::size_t nodes_visited = 0;
};

/// ceil(log(width / diam) / log(max ratio)) + 8, clamped at 8.
int default_attractor_depth(const Ifs1D& ifs, const Rational& width);

/// Decides whether the attractor meets `target`, restricted to the subtree
/// of `root` (i.e. against f_root(K)). Yes when some cylinder of depth <=
/// max_depth lies in the target; No when every cylinder is separated from it;
/// Undecided otherwise. Cylinders are explored depth-first in symbol order,
/// so the certificate is the first containing cylinder in that order.
AttractorQuery intersects_attractor(const Ifs1D& ifs, const IntervalQ& target, std::optional<int> max_depth = {},
                                    const Word& root = {});

/// First truncation beta of target_code with base a prefix of beta and
/// c_beta * diam(hull) in [c_1 Q, Q].
/// Throws std::invalid_argument when preconditions fail and
/// std::length_error when target_code is too short to reach the window.
Word find_branch(const Ifs1D& ifs, const Word& base, const Word& target_code, const Rational& max_diameter);

} // namespace vwak
