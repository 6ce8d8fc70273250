#include "vwak/mass.hpp"

#include "detail/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vwak {

MassTree::MassTree(CantorTree tree) : tree_(std::move(tree))
{
    const int depth = tree_.depth();
    mass_.assign(tree_.nodes.size(), Rational(0));
    mass_[0] = 1;
    for (std::size_t id = 0; id < tree_.nodes.size(); ++id) {
        const CantorNode& node = tree_.nodes[id];
        if (node.level < depth && node.children.empty()) {
            throw std::invalid_argument("assign_mass: node " + std::to_string(id) + " at level " +
                                        std::to_string(node.level) + " has no children");
        }
        if (node.children.empty()) {
            continue;
        }
        const Rational share = mass_[id] / static_cast<unsigned long>(node.children.size());
        for (std::size_t c : node.children) {
            mass_[c] = share;
        }
    }
    totals_.assign(depth + 1, Rational(0));
    sorted_.resize(depth + 1);
    for (int level = 0; level <= depth; ++level) {
        auto ids = tree_.levels[level];
        for (std::size_t id : ids) {
            totals_[level] += mass_[id];
        }
        std::sort(ids.begin(), ids.end(),
                  [&](std::size_t a, std::size_t b) { return tree_.nodes[a].center < tree_.nodes[b].center; });
        sorted_[level] = std::move(ids);
    }
}

MassTree assign_mass(CantorTree tree)
{
    return MassTree(std::move(tree));
}

MeasureEnclosure mass_of_interval(const MassTree& mt, const IntervalQ& window, std::optional<int> level)
{
    const CantorTree& tree = mt.tree();
    const int lv = level ? *level : tree.depth();
    if (lv < 0 || lv > tree.depth()) {
        throw std::out_of_range("mass_of_interval: level " + std::to_string(lv) + " outside the tree");
    }
    MeasureEnclosure out;
    out.depth = lv;
    if (window.empty()) {
        return out;
    }
    const auto& ids = mt.sorted_level(lv);
    // Balls of one level are disjoint, so sorting by centre also sorts both ends.
    auto first = std::partition_point(ids.begin(), ids.end(), [&](std::size_t id) {
        const CantorNode& n = tree.nodes[id];
        return n.center + n.radius_hi < window.lo;
    });
    Rational lo = 0;
    Rational hi = 0;
    for (auto it = first; it != ids.end(); ++it) {
        const CantorNode& n = tree.nodes[*it];
        const IntervalQ ball = n.closed_hi();
        if (ball.lo > window.hi) {
            break;
        }
        if (!window.intersects(ball)) {
            continue;
        }
        hi += mt.mass(*it);
        if (window.contains(ball)) {
            lo += mt.mass(*it);
        }
    }
    out.lo = lower_double(lo);
    out.hi = upper_double(hi);
    return out;
}

namespace {

struct Candidate {
    IntervalQ window;
    double diameter = 0.0;
};

bool window_less(const IntervalQ& a, const IntervalQ& b)
{
    if (a.lo != b.lo) {
        return a.lo < b.lo;
    }
    return a.hi < b.hi;
}

} // namespace

FrostmanReport frostman_scan(const MassTree& mt, double t, const ScanSpec& spec)
{
    if (!(t >= 0)) {
        throw std::invalid_argument("frostman_scan: t must be >= 0");
    }
    const CantorTree& tree = mt.tree();
    FrostmanReport report;
    report.t = t;

    double epsilon = 0.0;
    if (spec.epsilon) {
        epsilon = *spec.epsilon;
    } else if (tree.depth() >= 1) {
        for (std::size_t id : tree.levels[1]) {
            epsilon = std::max(epsilon, upper_double(2 * tree.nodes[id].radius_hi));
        }
    } else {
        epsilon = upper_double(2 * tree.root().radius_hi);
    }
    report.epsilon_used = epsilon;

    std::vector<Candidate> candidates;
    for (const auto& node : tree.nodes) {
        candidates.push_back({node.closed_hi(), lower_double(2 * node.radius_hi)});
    }
    report.tree_balls = candidates.size();

    const auto& deepest = mt.sorted_level(tree.depth());
    double smallest = std::numeric_limits<double>::infinity();
    for (std::size_t id : deepest) {
        smallest = std::min(smallest, lower_double(2 * tree.nodes[id].radius_hi));
    }
    report.k_first = spec.k_first ? *spec.k_first : static_cast<int>(std::ceil(-std::log2(epsilon)));
    report.k_last = spec.k_last ? *spec.k_last : static_cast<int>(std::floor(-std::log2(smallest)));

    std::vector<Rational> centres;
    for (std::size_t i = 0; i < deepest.size(); ++i) {
        const CantorNode& n = tree.nodes[deepest[i]];
        centres.push_back(n.center - n.radius_hi);
        centres.push_back(n.center + n.radius_hi);
        if (i + 1 < deepest.size()) {
            const CantorNode& next = tree.nodes[deepest[i + 1]];
            centres.push_back((n.center + n.radius_hi + next.center - next.radius_hi) / 2);
        }
    }
    for (int k = report.k_first; k <= report.k_last; ++k) {
        const Rational half = pow2(-k - 1);
        for (const auto& c : centres) {
            candidates.push_back({IntervalQ::closed(c - half, c + half), std::ldexp(1.0, -k)});
        }
    }
    report.windows = candidates.size() - report.tree_balls;

    std::vector<double> ratios(candidates.size());
    constexpr std::size_t kChunk = 256;
    const std::size_t chunks = (candidates.size() + kChunk - 1) / kChunk;
    detail::parallel_for(chunks, spec.workers, [&](std::size_t chunk) {
        const std::size_t end = std::min(candidates.size(), (chunk + 1) * kChunk);
        for (std::size_t i = chunk * kChunk; i < end; ++i) {
            const MeasureEnclosure m = mass_of_interval(mt, candidates[i].window);
            ratios[i] = m.hi / std::pow(candidates[i].diameter, t);
        }
    });

    double largest_diameter = 0.0;
    report.empirical_epsilon = std::numeric_limits<double>::infinity();
    bool have_witness = false;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const double d = candidates[i].diameter;
        largest_diameter = std::max(largest_diameter, d);
        if (ratios[i] > 1) {
            report.empirical_epsilon = std::min(report.empirical_epsilon, d);
        }
        if (!(d < epsilon)) {
            continue;
        }
        if (!have_witness || ratios[i] > report.worst_ratio ||
            (ratios[i] == report.worst_ratio && window_less(candidates[i].window, report.witness))) {
            report.worst_ratio = ratios[i];
            report.witness = candidates[i].window;
            have_witness = true;
        }
    }
    if (std::isinf(report.empirical_epsilon)) {
        report.empirical_epsilon = largest_diameter;
    }
    report.pass = report.worst_ratio <= 1;
    return report;
}

LocalExponent local_exponent_fit(const std::vector<std::pair<double, double>>& samples)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& [mass, diameter] : samples) {
        if (mass > 0 && diameter > 0) {
            xs.push_back(std::log(diameter));
            ys.push_back(std::log(mass));
        }
    }
    const LinearFit fit = least_squares(xs, ys, 2);
    LocalExponent out;
    out.t_star = fit.slope;
    out.r2 = fit.r2;
    out.samples = fit.samples;
    return out;
}

LocalExponent local_exponent_fit(const MassTree& mt, double s)
{
    const CantorTree& tree = mt.tree();
    if (tree.depth() < 2) {
        throw std::invalid_argument("local_exponent_fit: tree depth must be >= 2");
    }
    std::vector<std::pair<double, double>> samples;
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const CantorNode& n = tree.nodes[id];
        samples.emplace_back(to_double(mt.mass(id)), to_double(n.radius_lo + n.radius_hi));
    }
    LocalExponent out = local_exponent_fit(samples);
    const double v = to_double(tree.params.v);
    const double u = tree.params.u;
    out.target = s - u * (v - 1) / (v + 1);
    out.theorem_form = s - u * (1 - 2 / (v + 1));
    return out;
}

Json frostman_report_json(const FrostmanReport& report)
{
    Json out = {{"t", round12(report.t)},
                {"worst_ratio", round12(report.worst_ratio)},
                {"witness", {{"lo", to_string(report.witness.lo)}, {"hi", to_string(report.witness.hi)}}},
                {"epsilon_used", round12(report.epsilon_used)},
                {"empirical_epsilon", round12(report.empirical_epsilon)},
                {"tree_balls", report.tree_balls},
                {"windows", report.windows},
                {"k_first", report.k_first},
                {"k_last", report.k_last},
                {"pass", report.pass}};
    // A pass with constant 1 below epsilon is the mass distribution hypothesis.
    out["dimension_lower_bound"] = report.pass ? Json(round12(report.t)) : Json();
    return out;
}

Json mass_report_json(const MassTree& mt, const LocalExponent& fit)
{
    Json totals = Json::array();
    for (const auto& t : mt.level_totals()) {
        totals.push_back(to_string(t));
    }
    return {{"level_totals", totals},
            {"t_star", round12(fit.t_star)},
            {"r2", round12(fit.r2)},
            {"samples", fit.samples},
            {"target", round12(fit.target)},
            {"theorem_form", round12(fit.theorem_form)}};
}

} // namespace vwak
