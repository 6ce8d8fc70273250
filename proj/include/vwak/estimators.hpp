#pragma once

// Cover sums over the level families and the critical exponent at which
// their per-level mass stops growing.

#include "vwak/approx.hpp"
#include "vwak/covers.hpp"
#include "vwak/fit.hpp"

#include <string>
#include <vector>

namespace vwak {

struct ScalingFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::vector<int> levels_used;
    /// Same fit on hits only and on hits + undecided.
    LinearFit hits_only;
    LinearFit bracketed;
};

enum class Verdict { Converging, Diverging, Inconclusive };
std::string to_string(Verdict verdict);

struct LevelMass {
    int m = 0;
    std::uint64_t count = 0;
    /// Upper-rounded 2 psi(2^m) / 2^m.
    double diameter = 0.0;
    double mass = 0.0;
};

struct CoverSumReport {
    double l = 0.0;
    std::vector<LevelMass> per_level;
    /// partial_sums[i] = sum of per_level[0..i] masses.
    std::vector<double> partial_sums;
    /// Tail sums starting at each level (sum over m >= per_level[i].m).
    std::vector<double> tail_sums;
    double total = 0.0;
    Verdict verdict = Verdict::Inconclusive;
    /// Fitted slope of log2(mass) against m; NaN when not fittable.
    double exponent = 0.0;
};

/// Dead zone for judging the per-level exponent.
inline constexpr double kVerdictDeadZone = 0.05;

/// Sum over levels m >= start of count_hits(m) * (2 psi(2^m) / 2^m)^l.
/// Throws std::invalid_argument for an empty table, l < 0, or a start level
/// outside the table.
CoverSumReport hausdorff_partial_sum(const std::vector<CountRow>& counts, const ApproxSpec& spec, double l, int start);

struct CriticalExponent {
    /// From hits only.
    double l_star = 0.0;
    /// From hits + undecided.
    double l_star_bracketed = 0.0;
    ScalingFit count_fit;
    /// Slope of log2(diameter) against m (negative).
    double diameter_slope = 0.0;
    /// Closed form s - 1 + 2/(v+1).
    double formula_value = 0.0;
    double abs_gap = 0.0;
    /// (1+s) - v(1-s), the expected count slope.
    double expected_count_slope = 0.0;
    bool validated_regime = true;
};

/// Allowed distance between fitted and expected count slope before a run is
/// labelled as outside the validated regime.
inline constexpr double kRegimeTolerance = 0.15;

/// Real-valued per-level counts, e.g. for synthetic series.
struct LevelCount {
    int m = 0;
    double hits = 0.0;
    double undecided = 0.0;
};

std::vector<LevelCount> level_counts(const std::vector<CountRow>& counts);

/// l* = slope(log2 count) / -slope(log2 diameter) over [m_first, m_last].
/// Requires a power-law spec with v > 1 and at least three levels with
/// non-zero counts; throws std::invalid_argument / DegenerateFit otherwise.
CriticalExponent critical_exponent(const std::vector<LevelCount>& counts, const ApproxSpec& spec, double s,
                                   int m_first, int m_last);
CriticalExponent critical_exponent(const std::vector<CountRow>& counts, const ApproxSpec& spec, double s,
                                   int m_first, int m_last);

struct ConjectureRow {
    double v = 0.0;
    double first_branch = 0.0;  // s - 1 + 2/(v+1)
    double second_branch = 0.0; // s/(v+1)
    double value = 0.0;
    int active = 1; // 1 or 2
};

struct ConjectureTable {
    double s = 0.0;
    std::vector<ConjectureRow> rows;
    /// v = 1/(1-s), where the two branches meet; infinite for s = 1.
    double crossover_v = 0.0;
};

ConjectureTable conjecture_table(double s, const std::vector<double>& v_list);

/// CSV with header v,first_branch,second_branch,value,active.
std::string conjecture_csv(const ConjectureTable& table);

} // namespace vwak
