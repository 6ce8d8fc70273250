#include "vwak/estimators.hpp"

#include "vwak/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vwak {

namespace {

/// log2 of the upper-rounded level diameter 2 psi(2^m) / 2^m.
double log2_diameter(const ApproxSpec& spec, int m)
{
    const Bracket psi = spec.at_level(m);
    if (psi.hi <= 0) {
        return -std::numeric_limits<double>::infinity();
    }
    return log2_of(psi.hi) + 1 - m;
}

LinearFit fit_counts(const std::vector<LevelCount>& counts, int m_first, int m_last, bool with_undecided,
                     std::vector<int>* used)
{
    std::vector<double> xs;
    std::vector<double> ys;
    for (const auto& row : counts) {
        if (row.m < m_first || row.m > m_last) {
            continue;
        }
        const double n = row.hits + (with_undecided ? row.undecided : 0.0);
        if (!(n > 0)) {
            continue;
        }
        xs.push_back(row.m);
        ys.push_back(std::log2(n));
        if (used) {
            used->push_back(row.m);
        }
    }
    return least_squares(xs, ys, 3);
}

} // namespace

std::string to_string(Verdict verdict)
{
    switch (verdict) {
    case Verdict::Converging:
        return "converging";
    case Verdict::Diverging:
        return "diverging";
    case Verdict::Inconclusive:
        return "inconclusive";
    }
    return "inconclusive";
}

CoverSumReport hausdorff_partial_sum(const std::vector<CountRow>& counts, const ApproxSpec& spec, double l, int start)
{
    if (counts.empty()) {
        throw std::invalid_argument("hausdorff_partial_sum: empty count table");
    }
    if (!(l >= 0)) {
        throw std::invalid_argument("hausdorff_partial_sum: l must be >= 0");
    }
    const auto [lo_it, hi_it] = std::minmax_element(counts.begin(), counts.end(),
                                                    [](const CountRow& a, const CountRow& b) { return a.m < b.m; });
    if (start < lo_it->m || start > hi_it->m) {
        throw std::invalid_argument("hausdorff_partial_sum: start level " + std::to_string(start) +
                                    " outside the table");
    }
    std::vector<CountRow> rows(counts.begin(), counts.end());
    std::sort(rows.begin(), rows.end(), [](const CountRow& a, const CountRow& b) { return a.m < b.m; });

    CoverSumReport out;
    out.l = l;
    std::vector<double> xs;
    std::vector<double> ys;
    double running = 0.0;
    for (const auto& row : rows) {
        if (row.m < start) {
            continue;
        }
        LevelMass lm;
        lm.m = row.m;
        lm.count = row.count_hits;
        const double log2_diam = log2_diameter(spec, row.m);
        lm.diameter = std::nextafter(std::exp2(log2_diam), INFINITY);
        if (lm.count > 0) {
            const double log2_mass = std::log2(static_cast<double>(lm.count)) + l * log2_diam;
            lm.mass = std::exp2(log2_mass);
            xs.push_back(row.m);
            ys.push_back(log2_mass);
        }
        running += lm.mass;
        out.per_level.push_back(lm);
        out.partial_sums.push_back(running);
    }
    out.total = running;
    out.tail_sums.assign(out.per_level.size(), 0.0);
    double tail = 0.0;
    for (std::size_t i = out.per_level.size(); i-- > 0;) {
        tail += out.per_level[i].mass;
        out.tail_sums[i] = tail;
    }
    if (xs.empty()) {
        // Every level is empty: the sum is identically zero.
        out.verdict = Verdict::Converging;
        out.exponent = -std::numeric_limits<double>::infinity();
        return out;
    }
    if (xs.size() < 2) {
        out.verdict = Verdict::Inconclusive;
        out.exponent = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    const LinearFit fit = least_squares(xs, ys, 2);
    out.exponent = fit.slope;
    if (fit.slope < -kVerdictDeadZone) {
        out.verdict = Verdict::Converging;
    } else if (fit.slope > kVerdictDeadZone) {
        out.verdict = Verdict::Diverging;
    } else {
        out.verdict = Verdict::Inconclusive;
    }
    return out;
}

std::vector<LevelCount> level_counts(const std::vector<CountRow>& counts)
{
    std::vector<LevelCount> out;
    for (const auto& row : counts) {
        out.push_back({row.m, static_cast<double>(row.count_hits), static_cast<double>(row.count_undecided)});
    }
    return out;
}

CriticalExponent critical_exponent(const std::vector<CountRow>& counts, const ApproxSpec& spec, double s,
                                   int m_first, int m_last)
{
    return critical_exponent(level_counts(counts), spec, s, m_first, m_last);
}

CriticalExponent critical_exponent(const std::vector<LevelCount>& counts, const ApproxSpec& spec, double s,
                                   int m_first, int m_last)
{
    if (spec.kind() != ApproxSpec::Kind::PowerLaw) {
        throw std::invalid_argument("critical_exponent: needs a power-law approximation function");
    }
    const double v = to_double(spec.exponent());
    if (!(spec.exponent() > 1)) {
        throw std::invalid_argument("critical_exponent: v must exceed 1");
    }
    if (m_first > m_last) {
        throw std::invalid_argument("critical_exponent: empty level range");
    }
    CriticalExponent out;
    out.count_fit.hits_only = fit_counts(counts, m_first, m_last, false, &out.count_fit.levels_used);
    out.count_fit.bracketed = fit_counts(counts, m_first, m_last, true, nullptr);
    out.count_fit.slope = out.count_fit.hits_only.slope;
    out.count_fit.intercept = out.count_fit.hits_only.intercept;
    out.count_fit.r2 = out.count_fit.hits_only.r2;

    std::vector<double> xs;
    std::vector<double> ys;
    for (int m : out.count_fit.levels_used) {
        xs.push_back(m);
        ys.push_back(log2_diameter(spec, m));
    }
    out.diameter_slope = least_squares(xs, ys, 2).slope;
    if (!(out.diameter_slope < 0)) {
        throw DegenerateFit("critical_exponent: level diameters do not shrink");
    }
    out.l_star = out.count_fit.hits_only.slope / -out.diameter_slope;
    out.l_star_bracketed = out.count_fit.bracketed.slope / -out.diameter_slope;
    out.formula_value = s - 1 + 2 / (v + 1);
    out.abs_gap = std::fabs(out.l_star - out.formula_value);
    out.expected_count_slope = (1 + s) - v * (1 - s);
    out.validated_regime = std::fabs(out.count_fit.hits_only.slope - out.expected_count_slope) <= kRegimeTolerance;
    return out;
}

ConjectureTable conjecture_table(double s, const std::vector<double>& v_list)
{
    if (!(s > 0 && s <= 1)) {
        throw std::invalid_argument("conjecture_table: s must lie in (0, 1]");
    }
    ConjectureTable out;
    out.s = s;
    out.crossover_v = s < 1 ? 1 / (1 - s) : std::numeric_limits<double>::infinity();
    for (double v : v_list) {
        if (!(v >= 1)) {
            throw std::invalid_argument("conjecture_table: v must be >= 1");
        }
        ConjectureRow row;
        row.v = v;
        row.first_branch = s - 1 + 2 / (v + 1);
        row.second_branch = s / (v + 1);
        row.active = row.first_branch >= row.second_branch ? 1 : 2;
        row.value = std::max(row.first_branch, row.second_branch);
        out.rows.push_back(row);
    }
    return out;
}

std::string conjecture_csv(const ConjectureTable& table)
{
    std::string out = "v,first_branch,second_branch,value,active\n";
    for (const auto& r : table.rows) {
        out += format_double(r.v) + "," + format_double(r.first_branch) + "," + format_double(r.second_branch) + "," +
               format_double(r.value) + "," + std::to_string(r.active) + "\n";
    }
    return out;
}

} // namespace vwak
