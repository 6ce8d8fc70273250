#include "vwak/estimators.hpp"

#include <doctest.h>

#include <cmath>

using namespace vwak;

namespace {

std::vector<CountRow> rows_from(const std::vector<std::uint64_t>& hits, int first)
{
    std::vector<CountRow> out;
    for (std::size_t i = 0; i < hits.size(); ++i) {
        CountRow r;
        r.m = first + static_cast<int>(i);
        r.count_hits = hits[i];
        r.count_all = hits[i];
        out.push_back(r);
    }
    return out;
}

} // namespace

TEST_CASE("least squares on an exact line")
{
    const LinearFit f = least_squares({1, 2, 3}, {3, 5, 7});
    CHECK(f.slope == doctest::Approx(2));
    CHECK(f.intercept == doctest::Approx(1));
    CHECK(f.r2 == doctest::Approx(1));
    CHECK_THROWS_AS(least_squares({1}, {1}), DegenerateFit);
    CHECK_THROWS_AS(least_squares({1, 1}, {1, 2}), DegenerateFit);
    CHECK_THROWS_AS(least_squares({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("partial sums")
{
    const ApproxSpec spec = ApproxSpec::power_law(2);
    const auto rows = rows_from({4, 8, 16, 32}, 3);
    const CoverSumReport r = hausdorff_partial_sum(rows, spec, 0.0, 3);
    CHECK(r.total == doctest::Approx(60));
    CHECK(r.verdict == Verdict::Diverging);
    for (std::size_t i = 1; i < r.partial_sums.size(); ++i) {
        CHECK(r.partial_sums[i] >= r.partial_sums[i - 1]);
    }
    CHECK(r.tail_sums.front() == doctest::Approx(r.total));
    // mass = count * (2 psi(2^m)/2^m)^l with psi(2^m)/2^m = 2^-3m
    const CoverSumReport one = hausdorff_partial_sum(rows, spec, 1.0, 4);
    CHECK(one.per_level.front().mass == doctest::Approx(8 * 2 * std::ldexp(1.0, -12)));
    CHECK(one.verdict == Verdict::Converging);
    CHECK_THROWS_AS(hausdorff_partial_sum({}, spec, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff_partial_sum(rows, spec, -1.0, 3), std::invalid_argument);
    CHECK_THROWS_AS(hausdorff_partial_sum(rows, spec, 1.0, 9), std::invalid_argument);
}

TEST_CASE("all-zero counts converge")
{
    const CoverSumReport r = hausdorff_partial_sum(rows_from({0, 0, 0}, 2), ApproxSpec::power_law(2), 0.5, 2);
    CHECK(r.total == 0.0);
    CHECK(r.verdict == Verdict::Converging);
}

TEST_CASE("flat mass is inconclusive")
{
    // count 2^(3m) against diameter^1 = 2^(1-3m): constant per-level mass.
    const CoverSumReport r =
        hausdorff_partial_sum(rows_from({8, 64, 512, 4096}, 1), ApproxSpec::power_law(2), 1.0, 1);
    CHECK(r.verdict == Verdict::Inconclusive);
    CHECK(std::fabs(r.exponent) < 1e-12);
}

TEST_CASE("partial sums decrease in l")
{
    const auto rows = rows_from({3, 7, 20, 41, 90}, 4);
    const ApproxSpec spec = ApproxSpec::power_law(Rational(3, 2));
    double previous = INFINITY;
    for (double l = 0.0; l <= 1.0; l += 0.125) {
        const CoverSumReport r = hausdorff_partial_sum(rows, spec, l, 4);
        for (const auto& lm : r.per_level) {
            CHECK(lm.diameter < 1);
        }
        CHECK(r.total <= previous);
        previous = r.total;
    }
}

TEST_CASE("critical exponent recovers the closed form on synthetic counts")
{
    const double s = std::log(2.0) / std::log(3.0);
    for (const Rational v : {Rational(5, 4), Rational(3, 2), Rational(2), Rational(3)}) {
        const double vd = to_double(v);
        const double slope = (1 + s) - vd * (1 - s);
        std::vector<LevelCount> counts;
        for (int m = 4; m <= 12; ++m) {
            counts.push_back({m, std::exp2(slope * m), 0.0});
        }
        const CriticalExponent ce = critical_exponent(counts, ApproxSpec::power_law(v), s, 4, 12);
        CHECK(std::fabs(ce.l_star - (s - 1 + 2 / (vd + 1))) < 1e-9);
        CHECK(ce.abs_gap < 1e-9);
        CHECK(ce.validated_regime);
        CHECK(ce.l_star_bracketed == doctest::Approx(ce.l_star));
    }
}

TEST_CASE("critical exponent preconditions")
{
    const ApproxSpec spec = ApproxSpec::power_law(2);
    const std::vector<LevelCount> two = {{3, 4, 0}, {4, 8, 0}};
    CHECK_THROWS_AS(critical_exponent(two, spec, 0.5, 3, 4), DegenerateFit);
    const std::vector<LevelCount> three = {{3, 4, 0}, {4, 8, 0}, {5, 16, 0}};
    CHECK_THROWS_AS(critical_exponent(three, ApproxSpec::power_law(1), 0.5, 3, 5), std::invalid_argument);
    CHECK_THROWS_AS(critical_exponent(three, ApproxSpec::table({{3, 1}, {4, 1}, {5, 1}}), 0.5, 3, 5),
                    std::invalid_argument);
    // A slope far from (1+s) - v(1-s) is flagged.
    const CriticalExponent off = critical_exponent(three, spec, 0.5, 3, 5);
    CHECK_FALSE(off.validated_regime);
}

TEST_CASE("conjecture table branches")
{
    const double s = std::log(2.0) / std::log(3.0);
    const ConjectureTable t = conjecture_table(s, {1, 2, 10});
    CHECK(t.crossover_v == doctest::Approx(1 / (1 - s)));
    CHECK(t.rows[0].active == 1);
    CHECK(t.rows[0].value == doctest::Approx(s));
    CHECK(t.rows[2].active == 2);
    CHECK(t.rows[2].value == doctest::Approx(s / 11));
    CHECK(conjecture_csv(t).rfind("v,first_branch,second_branch,value,active\n", 0) == 0);
    CHECK(std::isinf(conjecture_table(1.0, {2}).crossover_v));
    CHECK_THROWS_AS(conjecture_table(0.0, {2}), std::invalid_argument);
    CHECK_THROWS_AS(conjecture_table(0.5, {0.5}), std::invalid_argument);
}
