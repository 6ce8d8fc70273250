#include "vwak/measure.hpp"

#include "vwak/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vwak {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;

double down(double x)
{
    return std::nextafter(x, -INFINITY);
}

double up(double x)
{
    return std::nextafter(x, INFINITY);
}

/// Running sum of non-negative terms with its rounding budget.
struct Accumulator {
    double sum = 0.0;
    std::size_t terms = 0;

    void add(double x)
    {
        sum += x;
        ++terms;
    }
    double lower() const
    {
        return std::max(0.0, down(sum * (1 - 2 * static_cast<double>(terms + 1) * kUnit)));
    }
    double upper() const
    {
        // Non-negative terms summing to exactly zero are all exact zeros.
        if (sum == 0) {
            return 0.0;
        }
        return up(sum * (1 + 2 * static_cast<double>(terms + 1) * kUnit));
    }
};

/// Depth-first pass over cylinders against a sorted list of pairwise
/// disjoint closed intervals of positive length.
class UnionWalker {
public:
    UnionWalker(const SelfSimilarMeasure& mu, const std::vector<IntervalQ>& sets, int depth)
        : mu_(mu), sets_(sets), depth_(depth), hull_(mu.ifs().hull())
    {
    }

    void run()
    {
        if (!sets_.empty()) {
            visit(Affine1D{}, 0, 1.0, 1.0);
        }
    }

    const Accumulator& inner() const { return inner_; }
    const Accumulator& outer() const { return outer_; }

private:
    void visit(const Affine1D& map, int k, double w_lo, double w_hi)
    {
        const Rational c_lo = map(hull_.lo);
        const Rational c_hi = map(hull_.hi);
        // First interval reaching strictly past the cylinder's left end.
        const auto it = std::partition_point(sets_.begin(), sets_.end(),
                                             [&](const IntervalQ& s) { return s.hi <= c_lo; });
        // Nothing, or only single-point contact, which carries no mass.
        if (it == sets_.end() || it->lo >= c_hi) {
            return;
        }
        if (it->lo <= c_lo && c_hi <= it->hi) {
            inner_.add(w_lo);
            outer_.add(w_hi);
            return;
        }
        if (k >= depth_) {
            outer_.add(w_hi);
            return;
        }
        const auto& ifs = mu_.ifs();
        for (std::size_t i = 1; i <= ifs.size(); ++i) {
            const auto [lo, hi] = mu_.weight(static_cast<int>(i));
            visit(map.compose(ifs.map(static_cast<int>(i))), k + 1, down(w_lo * lo), up(w_hi * hi));
        }
    }

    const SelfSimilarMeasure& mu_;
    const std::vector<IntervalQ>& sets_;
    int depth_;
    const IntervalQ& hull_;
    Accumulator inner_;
    Accumulator outer_;
};

/// Sorted, merged closed intervals with zero-length pieces removed.
std::vector<IntervalQ> merge(std::vector<IntervalQ> intervals)
{
    std::vector<IntervalQ> sorted;
    for (auto& iv : intervals) {
        if (iv.lo < iv.hi) {
            sorted.push_back(IntervalQ::closed(std::move(iv.lo), std::move(iv.hi)));
        }
    }
    std::sort(sorted.begin(), sorted.end(), [](const IntervalQ& a, const IntervalQ& b) { return a.lo < b.lo; });
    std::vector<IntervalQ> out;
    for (auto& iv : sorted) {
        if (!out.empty() && iv.lo <= out.back().hi) {
            if (iv.hi > out.back().hi) {
                out.back().hi = iv.hi;
            }
        } else {
            out.push_back(std::move(iv));
        }
    }
    return out;
}

MeasureEnclosure walk(const SelfSimilarMeasure& mu, const std::vector<IntervalQ>& merged, int depth)
{
    if (depth < 0) {
        throw std::invalid_argument("measure depth must be >= 0");
    }
    UnionWalker walker(mu, merged, depth);
    walker.run();
    MeasureEnclosure out;
    out.depth = depth;
    out.lo = std::min(1.0, walker.inner().lower());
    out.hi = std::min(1.0, walker.outer().upper());
    return out;
}

} // namespace

SelfSimilarMeasure::SelfSimilarMeasure(Ifs1D ifs) : ifs_(std::move(ifs))
{
    if (ifs_.size() < 2) {
        throw std::invalid_argument("self-similar measure needs at least two maps (one map gives a point mass)");
    }
    if (ifs_.diameter() == 0) {
        throw std::invalid_argument("self-similar measure needs a non-degenerate attractor hull");
    }
    s_ = solve_dimension_bracket(ifs_);
    // The bisection trusts the sign of a rounded sum; widen by the s-shift
    // that the rounding error of that sum can cause.
    const double slope = -std::log(to_double(ifs_.max_ratio()));
    const double widen = 64.0 * static_cast<double>(ifs_.size()) * kUnit / slope + 4 * kUnit;
    const double s_lo = s_.lo - widen;
    const double s_hi = s_.hi + widen;
    for (const auto& m : ifs_.maps()) {
        const double log_c = std::log(to_double(m.ratio));
        // c^s is decreasing in s.
        const double lo = std::exp(s_hi * log_c) * (1 - 16 * kUnit);
        const double hi = std::exp(s_lo * log_c) * (1 + 16 * kUnit);
        weights_.emplace_back(down(lo), std::min(1.0, up(hi)));
    }
}

std::pair<double, double> SelfSimilarMeasure::weight(int symbol) const
{
    if (symbol < 1 || static_cast<std::size_t>(symbol) > weights_.size()) {
        throw std::out_of_range("symbol " + std::to_string(symbol) + " out of range");
    }
    return weights_[static_cast<std::size_t>(symbol - 1)];
}

double SelfSimilarMeasure::max_weight() const
{
    double out = 0.0;
    for (const auto& w : weights_) {
        out = std::max(out, w.second);
    }
    return out;
}

MeasureEnclosure measure_interval(const SelfSimilarMeasure& mu, const IntervalQ& target, int depth)
{
    return measure_union(mu, {target}, depth);
}

MeasureEnclosure branch_measure_interval(const SelfSimilarMeasure& mu, const Word& alpha, const IntervalQ& target,
                                         int depth)
{
    return measure_interval(mu, alpha.map().preimage(target), depth);
}

MeasureEnclosure measure_union(const SelfSimilarMeasure& mu, std::vector<IntervalQ> intervals, int depth)
{
    return walk(mu, merge(std::move(intervals)), depth);
}

MeasureEnclosure measure_level_union(const SelfSimilarMeasure& mu, const std::vector<RationalBall>& balls, int depth)
{
    std::vector<IntervalQ> inner;
    std::vector<IntervalQ> outer;
    inner.reserve(balls.size());
    outer.reserve(balls.size());
    for (const auto& ball : balls) {
        const Rational center = ball.center();
        inner.push_back(IntervalQ::ball(center, ball.radius_lo));
        outer.push_back(IntervalQ::ball(center, ball.radius_hi));
    }
    const MeasureEnclosure lo = walk(mu, merge(std::move(inner)), depth);
    const MeasureEnclosure hi = walk(mu, merge(std::move(outer)), depth);
    return MeasureEnclosure{lo.lo, hi.hi, depth};
}

std::vector<Word> breadth_first_words(const Ifs1D& ifs, std::size_t n)
{
    std::vector<Word> out;
    if (n == 0) {
        return out;
    }
    out.emplace_back();
    for (std::size_t head = 0; out.size() < n; ++head) {
        for (std::size_t s = 1; s <= ifs.size() && out.size() < n; ++s) {
            out.push_back(out[head].extended(ifs, static_cast<int>(s)));
        }
    }
    return out;
}

RegularityEstimate estimate_regularity(const SelfSimilarMeasure& mu, std::size_t n_centers,
                                       const std::vector<Rational>& scales, int depth)
{
    if (n_centers == 0) {
        throw std::invalid_argument("estimate_regularity: need at least one center");
    }
    if (scales.empty()) {
        throw std::invalid_argument("estimate_regularity: need at least one scale");
    }
    const Rational diam = mu.ifs().diameter();
    for (const auto& r : scales) {
        if (r <= 0 || r > diam) {
            throw std::invalid_argument("estimate_regularity: scale " + to_string(r) + " outside (0, diam]");
        }
    }
    const double s = mu.dimension();
    RegularityEstimate out;
    out.a1_hat = std::numeric_limits<double>::infinity();
    out.a2_hat = 0.0;
    out.scale_min = *std::min_element(scales.begin(), scales.end());
    out.scale_max = *std::max_element(scales.begin(), scales.end());
    for (const auto& word : breadth_first_words(mu.ifs(), n_centers)) {
        const Rational x = word.map()(mu.ifs().hull().lo);
        for (const auto& r : scales) {
            const MeasureEnclosure e = measure_interval(mu, IntervalQ::ball(x, r), depth);
            const double ratio = e.mid() / std::pow(to_double(r), s);
            out.a1_hat = std::min(out.a1_hat, ratio);
            out.a2_hat = std::max(out.a2_hat, ratio);
            ++out.sample_count;
        }
    }
    return out;
}

LevelScaling fit_level_scaling(const SelfSimilarMeasure& mu, const ApproxSpec& spec, Family family, int m_first,
                               int m_last, const LevelScalingOptions& options)
{
    if (m_first > m_last) {
        throw std::invalid_argument("fit_level_scaling: empty level range");
    }
    LevelScaling out;
    std::vector<double> xs;
    std::vector<double> ys;
    for (int m = m_first; m <= m_last; ++m) {
        LocalEnumeration opts;
        opts.depth = options.attractor_depth;
        opts.workers = options.workers;
        CoverLevel level = enumerate_near_attractor(mu.ifs(), spec, m, family, mu.ifs().hull(), opts);
        std::vector<RationalBall> balls;
        balls.reserve(level.hits.size() + level.undecided.size());
        for (auto* part : {&level.hits, &level.undecided}) {
            for (auto& cb : *part) {
                balls.push_back(std::move(cb.ball));
            }
        }
        int depth = 8;
        if (options.depth) {
            depth = *options.depth;
        } else {
            const Bracket psi = spec.at_level(m);
            const QRange range = q_range(family, m);
            if (psi.lo > 0) {
                depth = default_attractor_depth(mu.ifs(), 2 * psi.lo / Rational(Integer(static_cast<long>(range.last))));
            }
        }
        LevelMeasureRow row;
        row.m = m;
        row.balls = balls.size();
        row.mu = measure_level_union(mu, balls, depth);
        row.log2_mid = row.mu.mid() > 0 ? std::log2(row.mu.mid()) : -std::numeric_limits<double>::infinity();
        if (row.mu.lo <= 0) {
            out.dropped_levels.push_back(m);
        } else {
            xs.push_back(m);
            ys.push_back(row.log2_mid);
        }
        out.rows.push_back(row);
    }
    try {
        out.fit = least_squares(xs, ys, 2);
    } catch (const DegenerateFit& e) {
        throw DegenerateFit(std::string("level scaling fit: ") + e.what() + " (" +
                            std::to_string(out.dropped_levels.size()) + " levels dropped with enclosure containing 0)");
    }
    return out;
}

std::string level_scaling_csv(const LevelScaling& scaling)
{
    std::string out = "m,mu_lo,mu_hi,log2_mid\n";
    for (const auto& row : scaling.rows) {
        out += std::to_string(row.m) + "," + format_double(row.mu.lo) + "," + format_double(row.mu.hi) + "," +
               format_double(row.log2_mid) + "\n";
    }
    return out;
}

} // namespace vwak
