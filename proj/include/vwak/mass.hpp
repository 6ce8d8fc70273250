#pragma once

// The equal-split measure on a Cantor tree: each ball passes its mass on in
// equal parts to its children. Masses are exact rationals.

#include "vwak/cantor.hpp"
#include "vwak/measure.hpp"
#include "vwak/report.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace vwak {

class MassTree {
public:
    /// Throws std::invalid_argument when a node above the deepest level has
    /// no children.
    explicit MassTree(CantorTree tree);

    const CantorTree& tree() const { return tree_; }
    const Rational& mass(std::size_t node) const { return mass_[node]; }
    /// Exact sum of the masses at each level.
    const std::vector<Rational>& level_totals() const { return totals_; }
    /// Node ids of a level sorted by ball position.
    const std::vector<std::size_t>& sorted_level(int level) const { return sorted_[level]; }

private:
    CantorTree tree_;
    std::vector<Rational> mass_;
    std::vector<Rational> totals_;
    std::vector<std::vector<std::size_t>> sorted_;
};

MassTree assign_mass(CantorTree tree);

/// Cover bounds from the closed upper-radius balls of one level (default:
/// the deepest): hi sums the balls meeting U, lo the balls inside U.
MeasureEnclosure mass_of_interval(const MassTree& mt, const IntervalQ& window, std::optional<int> level = {});

struct ScanSpec {
    /// Window widths 2^-k for k in [k_first, k_last]; defaults span the
    /// deepest ball diameter up to epsilon.
    std::optional<int> k_first;
    std::optional<int> k_last;
    /// Pass threshold; default is the largest level-1 ball diameter.
    std::optional<double> epsilon;
    unsigned workers = 0;
};

struct FrostmanSample {
    IntervalQ window;
    double diameter = 0.0;
    double ratio = 0.0;
};

struct FrostmanReport {
    double t = 0.0;
    double worst_ratio = 0.0;
    /// Window attaining worst_ratio among those with diameter < epsilon.
    IntervalQ witness;
    double epsilon_used = 0.0;
    /// Smallest scanned diameter at which the inequality fails, or the
    /// largest scanned diameter when it never fails.
    double empirical_epsilon = 0.0;
    std::size_t tree_balls = 0;
    std::size_t windows = 0;
    int k_first = 0;
    int k_last = 0;
    bool pass = false;
};

/// Scans every tree ball and sliding windows of width 2^-k centred on ball
/// endpoints and gap midpoints of the deepest level, tracking
/// hi(m(U)) / diam(U)^t. Throws std::invalid_argument for t < 0.
FrostmanReport frostman_scan(const MassTree& mt, double t, const ScanSpec& spec = {});

struct LocalExponent {
    double t_star = 0.0;
    double r2 = 0.0;
    std::size_t samples = 0;
    /// s - u(v-1)/(v+1).
    double target = 0.0;
    /// s - C(1 - 2/(v+1)) with C = u.
    double theorem_form = 0.0;
};

/// Slope of log mass against log diameter over (mass, diameter) samples.
/// Throws DegenerateFit with fewer than two distinct diameters.
LocalExponent local_exponent_fit(const std::vector<std::pair<double, double>>& samples);
/// Over all tree balls at levels >= 1; requires depth >= 2.
LocalExponent local_exponent_fit(const MassTree& mt, double s);

Json frostman_report_json(const FrostmanReport& report);
Json mass_report_json(const MassTree& mt, const LocalExponent& fit);

} // namespace vwak
