#pragma once

// Certified enclosures for the natural self-similar measure, whose weights
// are the irrational numbers c_i^s. Weights are kept as outward-rounded
// double intervals and every sum is widened by its rounding budget, so the
// returned [lo, hi] always contains the true value.

#include "vwak/approx.hpp"
#include "vwak/covers.hpp"
#include "vwak/fit.hpp"
#include "vwak/ifs.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vwak {

struct MeasureEnclosure {
    double lo = 0.0;
    double hi = 0.0;
    int depth = 0;

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool overlaps(const MeasureEnclosure& other) const { return lo <= other.hi && other.lo <= hi; }
};

class SelfSimilarMeasure {
public:
    /// Throws std::invalid_argument for a single-map system or a degenerate
    /// hull (both give an atom).
    explicit SelfSimilarMeasure(Ifs1D ifs);

    const Ifs1D& ifs() const { return ifs_; }
    double dimension() const { return s_.value(); }
    const DimensionBracket& dimension_bracket() const { return s_; }
    /// Interval [lo, hi] containing c_i^s for 1-based symbol i.
    std::pair<double, double> weight(int symbol) const;
    const std::vector<std::pair<double, double>>& weights() const { return weights_; }
    double max_weight() const;

private:
    Ifs1D ifs_;
    DimensionBracket s_;
    std::vector<std::pair<double, double>> weights_;
};

/// mu(target) for the closed interval spanned by target. Cylinders are
/// refined down to word length `depth`.
MeasureEnclosure measure_interval(const SelfSimilarMeasure& mu, const IntervalQ& target, int depth);

/// mu_alpha(target) = mu(f_alpha^{-1}(target)).
MeasureEnclosure branch_measure_interval(const SelfSimilarMeasure& mu, const Word& alpha, const IntervalQ& target,
                                         int depth);

/// mu of a union of closed intervals; overlapping intervals are merged
/// first. `depth` caps the word length.
MeasureEnclosure measure_union(const SelfSimilarMeasure& mu, std::vector<IntervalQ> intervals, int depth);

/// mu of the union of the balls: the lower end uses the lower radii and the
/// upper end the upper radii.
MeasureEnclosure measure_level_union(const SelfSimilarMeasure& mu, const std::vector<RationalBall>& balls,
                                     int depth);

struct RegularityEstimate {
    double a1_hat = 0.0;
    double a2_hat = 0.0;
    std::size_t sample_count = 0;
    Rational scale_min;
    Rational scale_max;
};

/// Centers are f_w(hull.lo) for the first n_centers words in breadth-first
/// order (so a larger n_centers is a superset). Ratios are
/// mid(mu(B(x, r))) / r^s over all centers and scales.
RegularityEstimate estimate_regularity(const SelfSimilarMeasure& mu, std::size_t n_centers,
                                       const std::vector<Rational>& scales, int depth);

/// First n words in breadth-first (length, then lexicographic) order.
std::vector<Word> breadth_first_words(const Ifs1D& ifs, std::size_t n);

struct LevelMeasureRow {
    int m = 0;
    MeasureEnclosure mu;
    double log2_mid = 0.0;
    std::uint64_t balls = 0;
};

struct LevelScaling {
    std::vector<LevelMeasureRow> rows;
    LinearFit fit;
    std::vector<int> dropped_levels;
};

struct LevelScalingOptions {
    /// Measure depth cap; default from the smallest ball at each level.
    std::optional<int> depth;
    /// Classification depth for the attractor-local enumeration.
    std::optional<int> attractor_depth;
    unsigned workers = 0;
};

/// log2 mu(level set) against m. Balls disjoint from K carry no measure, so
/// each level uses the hit and undecided balls of the attractor-local
/// enumeration over the hull. Levels whose enclosure contains 0 are dropped.
/// Throws DegenerateFit when fewer than two levels remain.
LevelScaling fit_level_scaling(const SelfSimilarMeasure& mu, const ApproxSpec& spec, Family family, int m_first,
                               int m_last, const LevelScalingOptions& options = {});

/// CSV with header m,mu_lo,mu_hi,log2_mid.
std::string level_scaling_csv(const LevelScaling& scaling);

} // namespace vwak
