#include "support.hpp"

#include "vwak/covers.hpp"

#include <doctest.h>

using namespace vwak;
using vwak::testing::brute_cantor_count;
using vwak::testing::brute_disjoint;
using vwak::testing::cantor_ifs;
using vwak::testing::cantor_meets;
using vwak::testing::Rng;

TEST_CASE("approximation functions at dyadic levels")
{
    const ApproxSpec v2 = ApproxSpec::power_law(2);
    CHECK(v2.at_level(3).exact());
    CHECK(v2.at_level(3).lo == Rational(1, 64));
    const Bracket odd = ApproxSpec::power_law(Rational(3, 2)).at_level(3);
    CHECK(odd.lo < odd.hi);
    CHECK(v2.scaled(Rational(1, 3)).at_level(1).lo == Rational(1, 12));
    const ApproxSpec table = ApproxSpec::table({{1, Rational(1, 4)}, {2, Rational(1, 16)}});
    CHECK(table.at_level(2).lo == Rational(1, 16));
    CHECK_THROWS_AS(table.at_level(3), std::out_of_range);
    CHECK_THROWS_AS(ApproxSpec::table({{1, Rational(1, 16)}, {2, Rational(1, 4)}}), std::invalid_argument);
    CHECK_THROWS_AS(ApproxSpec::power_law(0), std::invalid_argument);
}

TEST_CASE("family blocks")
{
    CHECK(q_range(Family::A, 3).first == 8);
    CHECK(q_range(Family::A, 3).last == 16);
    CHECK(q_range(Family::D, 3).first == 4);
    CHECK(q_range(Family::D, 3).last == 8);
    CHECK_THROWS_AS(q_range(Family::A, 0), std::invalid_argument);
    CHECK(parse_family("d") == Family::D);
    CHECK_THROWS_AS(parse_family("B"), std::invalid_argument);
}

TEST_CASE("enumerated balls are primitive and meet the window")
{
    const ApproxSpec spec = ApproxSpec::power_law(Rational(3, 2));
    const IntervalQ window = IntervalQ::closed(Rational(1, 5), Rational(2, 5));
    const auto balls = enumerate_balls(spec, 5, Family::A, window);
    CHECK(balls.size() == count_family(spec, 5, Family::A, window));
    for (std::size_t i = 0; i < balls.size(); ++i) {
        CHECK(std::gcd(balls[i].p, balls[i].q) == 1);
        CHECK(balls[i].closed_hi().intersects(window));
        if (i > 0) {
            const bool ordered = balls[i - 1].q < balls[i].q ||
                                 (balls[i - 1].q == balls[i].q && balls[i - 1].p < balls[i].p);
            CHECK(ordered);
        }
    }
    CHECK(enumerate_balls(ApproxSpec::power_law(1, 0), 3, Family::A, window).empty());
}

TEST_CASE("counts agree with the ternary-digit oracle")
{
    const Ifs1D ifs = cantor_ifs();
    for (const Rational v : {Rational(3, 2), Rational(2), Rational(5, 4)}) {
        const ApproxSpec spec = ApproxSpec::power_law(v);
        for (int m = 2; m <= 6; ++m) {
            for (Family family : {Family::A, Family::D}) {
                const auto brute = brute_cantor_count(spec, m, family);
                const CoverLevel local = enumerate_near_attractor(ifs, spec, m, family, ifs.hull());
                CHECK(local.count_all == brute.all);
                // Hits certify the open lower ball; misses exclude the closed upper ball.
                CHECK(local.hits.size() <= brute.meets_hi);
                CHECK(local.hits.size() + local.undecided.size() >= brute.meets_lo);
                if (local.undecided.empty() && brute.meets_lo == brute.meets_hi) {
                    CHECK(local.hits.size() == brute.meets_hi);
                }
                CHECK(local.miss_count + local.hits.size() + local.undecided.size() == local.count_all);
            }
        }
    }
}

TEST_CASE("local enumeration matches enumerate-then-filter")
{
    const Ifs1D ifs = cantor_ifs();
    Rng rng(5);
    for (int trial = 0; trial < 12; ++trial) {
        Rational a = rng.unit(40);
        Rational b = rng.unit(40);
        if (a > b) {
            std::swap(a, b);
        }
        const IntervalQ window = IntervalQ::closed(a, b);
        const int m = static_cast<int>(rng.range(3, 7));
        const ApproxSpec spec = ApproxSpec::power_law(Rational(static_cast<long>(rng.range(5, 12)), 4));
        const Family family = rng.range(0, 1) ? Family::A : Family::D;
        const CoverLevel filtered = filter_attractor_hits(ifs, enumerate_balls(spec, m, family, window));
        const CoverLevel local = enumerate_near_attractor(ifs, spec, m, family, window);
        REQUIRE(local.hits.size() == filtered.hits.size());
        for (std::size_t i = 0; i < local.hits.size(); ++i) {
            CHECK(local.hits[i].ball.p == filtered.hits[i].ball.p);
            CHECK(local.hits[i].ball.q == filtered.hits[i].ball.q);
        }
        CHECK(local.undecided.size() == filtered.undecided.size());
        CHECK(local.count_all == filtered.hits.size() + filtered.undecided.size() + filtered.misses.size());
    }
}

TEST_CASE("hit certificates lie inside the lower ball")
{
    const Ifs1D ifs = cantor_ifs();
    const CoverLevel level = enumerate_near_attractor(ifs, ApproxSpec::power_law(Rational(3, 2)), 6, Family::A,
                                                      ifs.hull());
    CHECK(level.hits.size() == 194);
    for (const auto& hit : level.hits) {
        const Word w(ifs, hit.certificate);
        CHECK(hit.ball.open_lo().contains(code_point(ifs, w)));
        CHECK(cantor_meets(hit.ball.center() - hit.ball.radius_hi, hit.ball.center() + hit.ball.radius_hi));
    }
}

TEST_CASE("worker count does not change results")
{
    const Ifs1D ifs = cantor_ifs();
    const ApproxSpec spec = ApproxSpec::power_law(Rational(3, 2));
    const auto one = count_table(ifs, spec, Family::A, 5, 9, ifs.hull(), {std::nullopt, 1});
    const auto many = count_table(ifs, spec, Family::A, 5, 9, ifs.hull(), {std::nullopt, 8});
    CHECK(count_table_csv(one) == count_table_csv(many));
    CHECK(count_table_csv(one).rfind("m,count_all,count_hits,count_undecided,log2_radius_hi\n", 0) == 0);
}

TEST_CASE("window far from the hull gives empty rows")
{
    const Ifs1D ifs = cantor_ifs();
    const auto rows = count_table(ifs, ApproxSpec::power_law(2), Family::A, 3, 4, IntervalQ::closed(10, 11));
    for (const auto& r : rows) {
        CHECK(r.count_hits == 0);
        CHECK(r.count_undecided == 0);
    }
}

TEST_CASE("disjointness checks agree with the quadratic oracle")
{
    for (const Rational v : {Rational(1), Rational(3, 2), Rational(2)}) {
        const ApproxSpec spec = ApproxSpec::power_law(v);
        for (int m = 2; m <= 6; ++m) {
            for (Family family : {Family::A, Family::D}) {
                const auto balls = enumerate_balls(spec, m, family, IntervalQ::closed(0, 1));
                const bool brute = brute_disjoint(balls);
                const DisjointnessResult sorted = check_pairwise_disjoint(balls);
                const DisjointnessResult streamed = check_family_disjoint(spec, m, family, IntervalQ::closed(0, 1));
                CHECK(sorted.disjoint == brute);
                CHECK(streamed.disjoint == brute);
                CHECK(streamed.balls == balls.size());
                if (brute && sorted.min_gap && streamed.min_gap) {
                    CHECK(*sorted.min_gap == *streamed.min_gap);
                }
                if (!brute) {
                    REQUIRE(streamed.witness);
                    CHECK(streamed.witness->first.closed_hi().intersects(streamed.witness->second.closed_hi()));
                }
            }
        }
    }
}

TEST_CASE("v = 2 families are disjoint from level 4")
{
    const ApproxSpec spec = ApproxSpec::power_law(2);
    for (int m = 4; m <= 9; ++m) {
        CHECK(check_family_disjoint(spec, m, Family::A, IntervalQ::closed(0, 1)).disjoint);
        CHECK(check_family_disjoint(spec, m, Family::D, IntervalQ::closed(0, 1)).disjoint);
    }
}
