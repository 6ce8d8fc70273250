#pragma once

// Families of rational balls B(p/q, psi(2^m)/q) with primitive (p, q) and q
// in a dyadic block, their classification against the attractor, and exact
// disjointness checks.
//
//   family A, level m: 2^m     <= q < 2^(m+1)
//   family D, level m: 2^(m-1) <= q < 2^m

#include "vwak/approx.hpp"
#include "vwak/ifs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vwak {

enum class Family { A, D };

std::string to_string(Family family);
/// "A" or "D" (case-insensitive). Throws std::invalid_argument.
Family parse_family(std::string_view text);

/// Half-open denominator block [first, last) for a family at level m.
struct QRange {
    std::int64_t first = 0;
    std::int64_t last = 0;
};
QRange q_range(Family family, int m);

struct RationalBall {
    std::int64_t p = 0;
    std::int64_t q = 1;
    int m = 0;
    Family family = Family::A;
    Rational radius_lo;
    Rational radius_hi;

    Rational center() const;
    /// Closed ball with the upper radius.
    IntervalQ closed_hi() const { return IntervalQ::ball(center(), radius_hi); }
    /// Open ball with the lower radius.
    IntervalQ open_lo() const { return IntervalQ::open_ball(center(), radius_lo); }
};

/// Ball for (p, q) at level m with radius bracket psi(2^m)/q.
RationalBall make_ball(std::int64_t p, std::int64_t q, int m, Family family, const Bracket& psi);

struct ClassifiedBall {
    RationalBall ball;
    TriBool status = TriBool::Undecided;
    /// For hits: a word whose cylinder lies inside the open lower-radius ball.
    std::vector<int> certificate;
};

struct CoverLevel {
    int m = 0;
    Family family = Family::A;
    std::vector<ClassifiedBall> hits;
    std::vector<ClassifiedBall> undecided;
    /// Materialized misses; empty for attractor-local enumeration, where
    /// only miss_count is kept.
    std::vector<ClassifiedBall> misses;
    std::uint64_t miss_count = 0;
    /// Number of family members meeting the window.
    std::uint64_t count_all = 0;
    int depth = 0;
};

/// Work counters for the attractor-local enumeration.
struct WalkCounters {
    std::uint64_t nodes = 0;
    std::uint64_t candidates = 0;
    std::uint64_t kernel_nodes = 0;
    std::uint64_t exact_fallbacks = 0;
};

/// Every primitive (p, q) of the family whose closed upper-radius ball meets
/// the window. Sorted by (q, p).
std::vector<RationalBall> enumerate_balls(const ApproxSpec& spec, int m, Family family, const IntervalQ& window);

/// Classifies each ball against the attractor: hit when some cylinder of
/// depth <= `depth` lies in the open lower-radius ball, miss when every
/// cylinder is disjoint from the closed upper-radius ball. A missing depth
/// uses default_attractor_depth on the ball diameter.
CoverLevel filter_attractor_hits(const Ifs1D& ifs, const std::vector<RationalBall>& balls,
                                 std::optional<int> depth = {});

struct LocalEnumeration {
    /// Restrict to the attractor piece f_root(K).
    Word root;
    /// Absolute cylinder depth cap for classification; default from the
    /// ball diameter at the smallest q.
    std::optional<int> depth;
    /// 0 selects the available hardware parallelism.
    unsigned workers = 0;
};

/// Same classification as enumerate_balls + filter_attractor_hits, but only
/// balls near cylinders of K are ever generated. Hits and undecided balls are
/// returned sorted by (q, p); misses are only counted.
CoverLevel enumerate_near_attractor(const Ifs1D& ifs, const ApproxSpec& spec, int m, Family family,
                                    const IntervalQ& window, const LocalEnumeration& options = {},
                                    WalkCounters* counters = nullptr);

/// Number of primitive (p, q) with q in the family block whose closed
/// upper-radius ball meets the window.
std::uint64_t count_family(const ApproxSpec& spec, int m, Family family, const IntervalQ& window);

struct DisjointnessResult {
    bool disjoint = true;
    /// Smallest gap between consecutive closed balls in center order; unset
    /// with fewer than two balls.
    std::optional<Rational> min_gap;
    std::uint64_t balls = 0;
    /// First overlapping pair found (indices into the input, or (q,p) pairs
    /// for streaming checks).
    std::optional<std::pair<RationalBall, RationalBall>> witness;
};

/// Exact pairwise disjointness of the closed upper-radius balls.
DisjointnessResult check_pairwise_disjoint(const std::vector<RationalBall>& balls);

/// Same check over the whole family meeting `window`, streamed in Farey
/// order without materializing the balls.
DisjointnessResult check_family_disjoint(const ApproxSpec& spec, int m, Family family, const IntervalQ& window);

struct CountRow {
    int m = 0;
    std::uint64_t count_all = 0;
    std::uint64_t count_hits = 0;
    std::uint64_t count_undecided = 0;
    /// log2(psi_hi(2^m) / 2^m).
    double log2_radius_hi = 0.0;
};

struct CountTableOptions {
    std::optional<int> depth;
    unsigned workers = 0;
};

std::vector<CountRow> count_table(const Ifs1D& ifs, const ApproxSpec& spec, Family family, int m_first, int m_last,
                                  const IntervalQ& window, const CountTableOptions& options = {});

/// CSV with header m,count_all,count_hits,count_undecided,log2_radius_hi.
std::string count_table_csv(const std::vector<CountRow>& rows);

} // namespace vwak
