#include "support.hpp"

#include "vwak/cantor.hpp"
#include "vwak/mass.hpp"

#include <doctest.h>

#include <cmath>

using namespace vwak;
using vwak::testing::cantor_ifs;
using vwak::testing::cantor_meets;

namespace {

const CantorTree& toy_tree()
{
    static const CantorTree tree = [] {
        SchemeParams p;
        p.v = Rational(5, 4);
        p.u = 2;
        p.m0 = 3;
        p.depth = 2;
        return build_scheme(cantor_ifs(), p);
    }();
    return tree;
}

RegularityEstimate regularity(const SelfSimilarMeasure& mu)
{
    std::vector<Rational> scales;
    for (int k = 1; k <= 16; ++k) {
        scales.push_back(pow2(-k));
    }
    return estimate_regularity(mu, 64, scales, 28);
}

/// Hand-made tree: root with three children, the first of which has two.
CantorTree small_tree()
{
    CantorTree t{SchemeParams{}, cantor_ifs(), {}, {}, {}, {1, 1}};
    t.params.depth = 2;
    auto node = [&](int level, Rational c, Rational r, std::optional<std::size_t> parent) {
        CantorNode n;
        n.level = level;
        n.center = c;
        n.radius_lo = r;
        n.radius_hi = r;
        n.parent = parent;
        t.nodes.push_back(n);
        if (parent) {
            t.nodes[*parent].children.push_back(t.nodes.size() - 1);
        }
        if (static_cast<int>(t.levels.size()) <= level) {
            t.levels.resize(level + 1);
        }
        t.levels[level].push_back(t.nodes.size() - 1);
    };
    node(0, Rational(1, 2), 4, std::nullopt);
    node(1, Rational(1, 10), Rational(1, 20), 0);
    node(1, Rational(5, 10), Rational(1, 20), 0);
    node(1, Rational(9, 10), Rational(1, 20), 0);
    node(2, Rational(8, 100), Rational(1, 100), 1);
    node(2, Rational(12, 100), Rational(1, 100), 1);
    node(2, Rational(50, 100), Rational(1, 100), 2);
    node(2, Rational(90, 100), Rational(1, 100), 3);
    return t;
}

} // namespace

TEST_CASE("scheme parameters")
{
    SchemeParams p;
    CHECK_NOTHROW(p.validate());
    CHECK(p.level_exponent(2) == 12);
    p.v = 1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.v = 2;
    p.u = 1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p.u = 4;
    p.depth = 3;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("toy scheme structure")
{
    const CantorTree& tree = toy_tree();
    REQUIRE(tree.depth() == 2);
    CHECK(tree.levels[1].size() == 32);
    CHECK(tree.root().center == 0);
    CHECK(tree.root().radius_lo == 4);
    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const CantorNode& n = tree.nodes[id];
        const CantorNode& parent = tree.nodes[*n.parent];
        CHECK(parent.open_lo().contains(n.closed_hi()));
        CHECK(is_prefix(parent.word, n.word));
        // Each ball's third meets the attractor piece of its parent.
        const Rational third = n.radius_hi / 3;
        CHECK(cantor_meets(n.center - third, n.center + third));
        CHECK(std::gcd(n.p, n.q) == 1);
    }
    for (std::size_t id : tree.levels[1]) {
        const auto& kids = tree.nodes[id].children;
        for (std::size_t i = 1; i < kids.size(); ++i) {
            const CantorNode& a = tree.nodes[kids[i - 1]];
            const CantorNode& b = tree.nodes[kids[i]];
            CHECK((a.q < b.q || (a.q == b.q && a.p < b.p)));
        }
    }
}

TEST_CASE("toy scheme verifies")
{
    const CantorTree& tree = toy_tree();
    const SelfSimilarMeasure mu(tree.ifs);
    const SchemeReport report = verify_scheme(tree, mu, regularity(mu));
    for (const auto& c : report.checks) {
        INFO(c.id << ": " << c.detail);
        CHECK(c.passed);
    }
    CHECK(report.leaf_paths == tree.levels[2].size());
    CHECK(report.levels.size() == 2);
    for (const auto& l : report.levels) {
        CHECK(l.count_ratio <= kChildCountBand);
    }
}

TEST_CASE("leaf approximations are certified")
{
    const CantorTree& tree = toy_tree();
    const auto paths = leaf_paths(tree);
    REQUIRE_FALSE(paths.empty());
    for (const auto& path : paths) {
        const IntervalQ e = leaf_enclosure(tree, path);
        const auto pairs = certify_approximations(tree, path);
        REQUIRE(pairs.size() == 2);
        CHECK(pairs[0].q >= 32);
        CHECK(pairs[0].q < 64);
        CHECK(pairs[1].q >= 2048);
        CHECK(pairs[1].q < 4096);
        // |q x - p| < q^(-5/4) at the enclosure midpoint, checked in doubles.
        const double x = to_double((e.lo + e.hi) / 2);
        for (const auto& a : pairs) {
            CHECK(std::fabs(a.q * x - a.p) < std::pow(static_cast<double>(a.q), -1.25));
        }
    }
    CHECK_THROWS_AS(leaf_enclosure(tree, {1000}), std::out_of_range);
}

TEST_CASE("huge v starves a level")
{
    SchemeParams p;
    p.v = 10;
    p.m0 = 3;
    p.depth = 2;
    try {
        build_scheme(cantor_ifs(), p);
        FAIL("expected ZeroChildren");
    } catch (const SchemeError& e) {
        CHECK(e.kind() == SchemeError::Kind::ZeroChildren);
        CHECK(e.identifier() == "ZeroChildren");
    }
}

TEST_CASE("scheme needs the open set condition")
{
    const Ifs1D overlap({{Rational(2, 3), 0}, {Rational(2, 3), Rational(1, 3)}});
    CHECK_THROWS_AS(build_scheme(overlap, SchemeParams{}), std::invalid_argument);
}

TEST_CASE("tree dump round-trips")
{
    const CantorTree& tree = toy_tree();
    const Json dumped = tree_to_json(tree);
    const CantorTree loaded = tree_from_json(dumped);
    CHECK(dump_json(tree_to_json(loaded)) == dump_json(dumped));
    REQUIRE(loaded.nodes.size() == tree.nodes.size());
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        CHECK(loaded.nodes[i].word == tree.nodes[i].word);
        CHECK(loaded.nodes[i].radius_hi == tree.nodes[i].radius_hi);
        CHECK(loaded.nodes[i].children == tree.nodes[i].children);
    }
    Json broken = dumped;
    broken["params"]["depth"] = 3;
    CHECK_THROWS_AS(tree_from_json(broken), std::invalid_argument);
    CHECK_THROWS_AS(tree_from_json(Json::object()), std::invalid_argument);
}

TEST_CASE("equal split masses")
{
    const MassTree mt = assign_mass(small_tree());
    CHECK(mt.mass(0) == 1);
    CHECK(mt.mass(1) == Rational(1, 3));
    CHECK(mt.mass(4) == Rational(1, 6));
    CHECK(mt.mass(7) == Rational(1, 3));
    for (const auto& total : mt.level_totals()) {
        CHECK(total == 1);
    }
    CantorTree defective = small_tree();
    defective.nodes[3].children.clear();
    defective.levels[2].pop_back();
    defective.nodes.pop_back();
    CHECK_THROWS_AS(assign_mass(defective), std::invalid_argument);
}

TEST_CASE("mass of intervals")
{
    const MassTree mt = assign_mass(small_tree());
    const MeasureEnclosure all = mass_of_interval(mt, IntervalQ::closed(-10, 10));
    CHECK(all.lo == 1.0);
    CHECK(all.hi == 1.0);
    const MeasureEnclosure none = mass_of_interval(mt, IntervalQ::closed(Rational(3, 10), Rational(4, 10)));
    CHECK(none.hi == 0.0);
    const MeasureEnclosure first = mass_of_interval(mt, mt.tree().nodes[1].closed_hi());
    CHECK(first.lo == doctest::Approx(1.0 / 3));
    CHECK(first.hi == doctest::Approx(1.0 / 3));
    // Cutting through a deepest ball leaves it in hi only.
    const MeasureEnclosure cut = mass_of_interval(mt, IntervalQ::closed(0, Rational(12, 100)));
    CHECK(cut.lo == doctest::Approx(1.0 / 6));
    CHECK(cut.hi == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(mass_of_interval(mt, IntervalQ::closed(0, 1), 3), std::out_of_range);
}

TEST_CASE("toy mass: conservation and covers")
{
    const MassTree mt = assign_mass(toy_tree());
    for (const auto& total : mt.level_totals()) {
        CHECK(total == 1);
    }
    for (std::size_t id : toy_tree().levels[1]) {
        const MeasureEnclosure e = mass_of_interval(mt, toy_tree().nodes[id].closed_hi());
        CHECK(e.lo == e.hi);
        CHECK(e.lo == to_double(mt.mass(id)));
    }
    vwak::testing::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        Rational a = rng.unit(300);
        Rational b = rng.unit(300);
        if (a > b) {
            std::swap(a, b);
        }
        const IntervalQ u = IntervalQ::closed(a, b);
        double previous = 2.0;
        for (int level = 0; level <= 2; ++level) {
            const MeasureEnclosure e = mass_of_interval(mt, u, level);
            CHECK(e.hi <= previous);
            CHECK(e.lo <= e.hi);
            previous = e.hi;
        }
        const Rational c = (a + b) / 2;
        const auto left = mass_of_interval(mt, IntervalQ::closed(a, c));
        const auto right = mass_of_interval(mt, IntervalQ::open(c, b));
        CHECK(mass_of_interval(mt, u).hi <= left.hi + right.hi + 1e-15);
    }
}

TEST_CASE("frostman scan")
{
    const MassTree mt = assign_mass(toy_tree());
    const FrostmanReport zero = frostman_scan(mt, 0.0);
    CHECK(zero.pass);
    CHECK(zero.worst_ratio <= 1.0);
    CHECK_FALSE(frostman_scan(mt, 1.0).pass);
    CHECK_THROWS_AS(frostman_scan(mt, -0.5), std::invalid_argument);

    const LocalExponent fit = local_exponent_fit(mt, solve_dimension(toy_tree().ifs));
    const FrostmanReport at = frostman_scan(mt, fit.t_star - 0.15);
    CHECK(at.pass);
    // Passing at t implies passing at every smaller t on the same sample.
    for (double t = 0.0; t < at.t; t += 0.01) {
        const FrostmanReport lower = frostman_scan(mt, t);
        CHECK(lower.pass);
        CHECK(lower.windows == at.windows);
    }
    ScanSpec many;
    many.workers = 8;
    ScanSpec one;
    one.workers = 1;
    CHECK(dump_json(frostman_report_json(frostman_scan(mt, 0.2, many))) ==
          dump_json(frostman_report_json(frostman_scan(mt, 0.2, one))));
    // The witness window reproduces the worst ratio.
    const MeasureEnclosure w = mass_of_interval(mt, at.witness);
    CHECK(w.hi / std::pow(to_double(at.witness.hi - at.witness.lo), at.t) == doctest::Approx(at.worst_ratio));
}

TEST_CASE("local exponent on synthetic trees")
{
    std::vector<std::pair<double, double>> binary;
    std::vector<std::pair<double, double>> power;
    const double s = std::log(2.0) / std::log(3.0);
    for (int level = 1; level <= 8; ++level) {
        const double diam = std::ldexp(1.0, -level);
        binary.emplace_back(diam, diam);
        const double d = std::pow(3.0, -level) * 1.7;
        power.emplace_back(std::pow(d, s), d);
    }
    CHECK(std::fabs(local_exponent_fit(binary).t_star - 1) < 1e-12);
    CHECK(std::fabs(local_exponent_fit(power).t_star - s) < 1e-9);
    CHECK_THROWS_AS(local_exponent_fit(std::vector<std::pair<double, double>>{{1, 1}}), DegenerateFit);

    CantorTree shallow = small_tree();
    shallow.params.depth = 1;
    shallow.levels.pop_back();
    for (auto& n : shallow.nodes) {
        if (n.level == 1) {
            n.children.clear();
        }
    }
    shallow.nodes.resize(4);
    CHECK_THROWS_AS(local_exponent_fit(assign_mass(shallow), 0.5), std::invalid_argument);
}
