#include "vwak/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <sstream>

namespace vwak {

namespace {

std::string ball_label(const CantorNode& node)
{
    std::ostringstream os;
    os << "level " << node.level << " ball " << node.p << "/" << node.q << " word [" << node.word.str() << "]";
    return os.str();
}

RationalBall as_ball(const CantorNode& node, int m)
{
    RationalBall b;
    b.p = node.p;
    b.q = node.q;
    b.m = m;
    b.family = Family::D;
    b.radius_lo = node.radius_lo;
    b.radius_hi = node.radius_hi;
    return b;
}

/// 2^(-M (v+1)), the scale of level-M radii.
Bracket level_scale(const SchemeParams& params, int m)
{
    return inverse_power_of_two(Rational(m) * (params.v + 1));
}

Bracket normalization_of(const Ifs1D& ifs, const SchemeParams& params)
{
    const Bracket top = inverse_power_of_two(-Rational(params.m0) * (params.v + 1));
    Bracket l{3 * top.lo * ifs.diameter(), 3 * top.hi * ifs.diameter()};
    if (l.lo < 1) {
        l.lo = 1;
    }
    if (l.hi < 1) {
        l.hi = 1;
    }
    return l;
}

/// The branch word for a child ball: the hit certificate padded with symbol 1
/// until its cylinder fits the diameter window.
Word branch_for(const Ifs1D& ifs, const Word& parent, const std::vector<int>& certificate, const Rational& q_max)
{
    Word code(ifs, certificate);
    const Rational diam = ifs.diameter();
    while (code.ratio() * diam > q_max) {
        code = code.extended(ifs, 1);
    }
    return find_branch(ifs, parent, code, q_max);
}

DisjointnessResult level_disjointness(const CantorTree& tree, int level)
{
    std::vector<RationalBall> balls;
    const int m = tree.params.level_exponent(level);
    for (std::size_t id : tree.levels[level]) {
        balls.push_back(as_ball(tree.nodes[id], m));
    }
    return check_pairwise_disjoint(balls);
}

std::string disjointness_message(int level, const DisjointnessResult& r)
{
    std::ostringstream os;
    os << "level " << level << ": balls overlap";
    if (r.witness) {
        os << " (" << r.witness->first.p << "/" << r.witness->first.q << " and " << r.witness->second.p << "/"
           << r.witness->second.q << ")";
    }
    return os.str();
}

} // namespace

int SchemeParams::level_exponent(int n) const
{
    if (n < 0) {
        throw std::invalid_argument("level index must be >= 0");
    }
    long long m = m0;
    for (int i = 0; i < n; ++i) {
        m *= u;
        if (m > 60) {
            throw std::invalid_argument("M0 * u^" + std::to_string(n) + " exceeds 60");
        }
    }
    if (m > 60) {
        throw std::invalid_argument("M0 exceeds 60");
    }
    return static_cast<int>(m);
}

void SchemeParams::validate() const
{
    if (!(v > 1)) {
        throw std::invalid_argument("v must exceed 1");
    }
    if (u < 2) {
        throw std::invalid_argument("u must be >= 2");
    }
    if (m0 < 1) {
        throw std::invalid_argument("M0 must be >= 1");
    }
    if (depth < 0) {
        throw std::invalid_argument("depth must be >= 0");
    }
    if (attractor_depth && *attractor_depth < 1) {
        throw std::invalid_argument("attractor depth must be >= 1");
    }
    level_exponent(depth);
}

std::string SchemeError::identifier() const
{
    switch (kind_) {
    case Kind::ZeroChildren:
        return "ZeroChildren";
    case Kind::DisjointnessViolation:
        return "DisjointnessViolation";
    case Kind::ContainmentViolation:
        return "ContainmentViolation";
    }
    return "SchemeError";
}

CantorTree build_scheme(const Ifs1D& ifs, const SchemeParams& params)
{
    params.validate();
    if (!check_osc(ifs)) {
        throw std::invalid_argument("IFS fails the open set condition on its hull interior");
    }
    CantorTree tree{params, ifs, {}, {}, {}, normalization_of(ifs, params)};

    CantorNode root;
    root.center = ifs.map(1).fixed_point();
    const Bracket top = level_scale(params, params.m0);
    const Rational four_diam = 4 * ifs.diameter();
    root.radius_lo = std::max(four_diam, top.lo);
    root.radius_hi = std::max(four_diam, top.hi);
    if (root.center.get_den().fits_slong_p() && root.center.get_num().fits_slong_p()) {
        root.p = root.center.get_num().get_si();
        root.q = root.center.get_den().get_si();
    }
    tree.nodes.push_back(root);
    tree.levels.push_back({0});

    const ApproxSpec psi = ApproxSpec::power_law(params.v);
    const ApproxSpec third = psi.scaled(Rational(1, 3));
    const IntervalQ hull = ifs.hull();

    for (int k = 0; k < params.depth; ++k) {
        const int m = params.level_exponent(k + 1);
        const Bracket radius_scale = psi.at_level(m);
        const Bracket scale = level_scale(params, m);
        const Rational q_max = scale.lo / 3;

        LevelStats stats;
        stats.level = k;
        stats.m = m;
        stats.nodes = tree.levels[k].size();
        stats.min_children = std::numeric_limits<std::size_t>::max();
        std::vector<std::size_t> next;

        for (std::size_t parent_id : tree.levels[k]) {
            const Word alpha = tree.nodes[parent_id].word;
            LocalEnumeration opts;
            opts.root = alpha;
            opts.depth = params.attractor_depth;
            opts.workers = params.workers;
            const CoverLevel level =
                enumerate_near_attractor(ifs, third, m, Family::D, alpha.map().image(hull), opts);
            stats.dropped_undecided += level.undecided.size();

            std::vector<std::size_t> kids;
            for (const auto& hit : level.hits) {
                const RationalBall ball = make_ball(hit.ball.p, hit.ball.q, m, Family::D, radius_scale);
                CantorNode child;
                child.level = k + 1;
                child.p = ball.p;
                child.q = ball.q;
                child.center = ball.center();
                child.radius_lo = ball.radius_lo;
                child.radius_hi = ball.radius_hi;
                child.word = branch_for(ifs, alpha, hit.certificate, q_max);
                child.parent = parent_id;

                const IntervalQ cylinder = child.word.map().image(hull);
                if (!IntervalQ::open_ball(child.center, 2 * child.radius_lo / 3).contains(cylinder)) {
                    throw SchemeError(SchemeError::Kind::ContainmentViolation,
                                      ball_label(child) + ": branch cylinder " + to_string(cylinder) +
                                          " is not inside the two-thirds ball");
                }
                if (!tree.nodes[parent_id].open_lo().contains(child.closed_hi())) {
                    throw SchemeError(SchemeError::Kind::ContainmentViolation,
                                      ball_label(child) + " is not inside its parent " +
                                          ball_label(tree.nodes[parent_id]));
                }
                kids.push_back(tree.nodes.size());
                tree.nodes.push_back(std::move(child));
            }
            if (kids.empty()) {
                throw SchemeError(SchemeError::Kind::ZeroChildren,
                                  ball_label(tree.nodes[parent_id]) + " has no children at M = " +
                                      std::to_string(m) + " (" + std::to_string(level.undecided.size()) +
                                      " undecided candidates dropped)");
            }
            stats.min_children = std::min(stats.min_children, kids.size());
            stats.max_children = std::max(stats.max_children, kids.size());
            tree.nodes[parent_id].children = kids;
            next.insert(next.end(), kids.begin(), kids.end());
        }
        tree.levels.push_back(std::move(next));
        tree.stats.push_back(stats);

        const DisjointnessResult disjoint = level_disjointness(tree, k + 1);
        if (!disjoint.disjoint) {
            throw SchemeError(SchemeError::Kind::DisjointnessViolation, disjointness_message(k + 1, disjoint));
        }
    }
    return tree;
}

bool SchemeReport::passed() const
{
    return std::all_of(checks.begin(), checks.end(), [](const SchemeCheck& c) { return c.passed; });
}

IntervalQ leaf_enclosure(const CantorTree& tree, const std::vector<std::size_t>& path)
{
    std::size_t id = 0;
    IntervalQ out = tree.nodes[0].open_lo();
    for (std::size_t step : path) {
        const auto& kids = tree.nodes[id].children;
        if (step >= kids.size()) {
            throw std::out_of_range("leaf_enclosure: child index " + std::to_string(step) + " out of range");
        }
        id = kids[step];
        const IntervalQ ball = tree.nodes[id].open_lo();
        if (ball.lo >= out.lo) {
            out.lo = ball.lo;
            out.lo_open = true;
        }
        if (ball.hi <= out.hi) {
            out.hi = ball.hi;
            out.hi_open = true;
        }
    }
    return out;
}

std::vector<Approximation> certify_approximations(const CantorTree& tree, const std::vector<std::size_t>& path)
{
    const IntervalQ enclosure = leaf_enclosure(tree, path);
    std::vector<Approximation> out;
    std::size_t id = 0;
    for (std::size_t step : path) {
        id = tree.nodes[id].children[step];
        const CantorNode& node = tree.nodes[id];
        const int m = tree.params.level_exponent(node.level);
        const QRange range = q_range(Family::D, m);
        if (node.q < range.first || node.q >= range.last) {
            throw std::logic_error(ball_label(node) + ": denominator outside [2^(M-1), 2^M)");
        }
        const Rational bound = inverse_power(Integer(static_cast<long>(node.q)), tree.params.v).lo;
        const Rational q(static_cast<long>(node.q));
        const Rational p(static_cast<long>(node.p));
        // The enclosure is open, so the closed bound at its ends gives strict
        // inequality inside.
        if (q * enclosure.lo - p < -bound || q * enclosure.hi - p > bound) {
            throw std::logic_error(ball_label(node) + ": leaf enclosure " + to_string(enclosure) +
                                   " is not within psi(q)/q of p/q");
        }
        out.push_back({node.p, node.q, node.level});
    }
    return out;
}

std::vector<std::vector<std::size_t>> leaf_paths(const CantorTree& tree)
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> path;
    const int depth = tree.depth();
    auto walk = [&](auto&& self, std::size_t id) -> void {
        const CantorNode& node = tree.nodes[id];
        if (node.level == depth) {
            out.push_back(path);
            return;
        }
        for (std::size_t i = 0; i < node.children.size(); ++i) {
            path.push_back(i);
            self(self, node.children[i]);
            path.pop_back();
        }
    };
    walk(walk, 0);
    return out;
}

SchemeReport verify_scheme(const CantorTree& tree, const SelfSimilarMeasure& mu, const RegularityEstimate& regularity,
                           const VerifyOptions& options)
{
    const Ifs1D& ifs = tree.ifs;
    const SchemeParams& params = tree.params;
    const IntervalQ hull = ifs.hull();
    const Rational diam = ifs.diameter();
    const double s_lo = mu.dimension_bracket().lo;
    const double s = mu.dimension();
    const double v = to_double(params.v);

    SchemeReport report;
    report.a1_hat = regularity.a1_hat;
    report.worst_measure_margin = std::numeric_limits<double>::infinity();

    SchemeCheck nesting{"nesting", true, ""};
    SchemeCheck containment{"branch_containment", true, ""};
    SchemeCheck radius{"radius_window", true, ""};
    SchemeCheck diameter{"diameter_window", true, ""};
    SchemeCheck denominators{"denominator_range", true, ""};
    SchemeCheck measure{"measure_lower_bound", true, ""};
    auto fail = [](SchemeCheck& check, const std::string& detail) {
        if (check.passed) {
            check.passed = false;
            check.detail = detail;
        }
    };

    for (std::size_t id = 1; id < tree.nodes.size(); ++id) {
        const CantorNode& node = tree.nodes[id];
        const CantorNode& parent = tree.nodes[*node.parent];
        const int m = params.level_exponent(node.level);
        if (!parent.open_lo().contains(node.closed_hi())) {
            fail(nesting, ball_label(node) + " is not inside its parent");
        }
        if (!is_prefix(parent.word, node.word) ||
            !IntervalQ::open_ball(node.center, 2 * node.radius_lo / 3).contains(node.word.map().image(hull))) {
            fail(containment, ball_label(node) + ": branch cylinder not inside the two-thirds ball");
        }
        const Bracket scale = level_scale(params, m);
        if (!(node.radius_lo > scale.hi && node.radius_hi <= 2 * scale.lo)) {
            fail(radius, ball_label(node) + ": radius outside (2^(-M(v+1)), 2^(1-M(v+1))]");
        }
        const Rational width = node.word.ratio() * diam;
        const Rational q_lo = scale.lo / 3;
        const Rational q_hi = scale.hi / 3;
        if (width < ifs.min_ratio() * q_hi || width > tree.normalization.lo * q_lo) {
            fail(diameter, ball_label(node) + ": branch diameter " + to_string(width) + " outside the window");
        }
        const QRange range = q_range(Family::D, m);
        if (node.q < range.first || node.q >= range.last || std::gcd(node.p, node.q) != 1) {
            fail(denominators, ball_label(node) + ": denominator outside [2^(M-1), 2^M) or not reduced");
        }

        const int depth =
            options.measure_depth ? *options.measure_depth : default_attractor_depth(ifs, 2 * node.radius_lo);
        const MeasureEnclosure enc = measure_interval(mu, IntervalQ::ball(node.center, node.radius_lo), depth);
        const double r = upper_double(node.radius_hi);
        // (2r/3)^s is largest at the smallest s while 2r/3 < 1.
        const double exponent = 2 * r / 3 < 1 ? s_lo : mu.dimension_bracket().hi;
        const double required = regularity.a1_hat * std::pow(2 * r / 3, exponent) * (1 + 1e-12);
        const double margin = required > 0 ? enc.lo / required : std::numeric_limits<double>::infinity();
        report.worst_measure_margin = std::min(report.worst_measure_margin, margin);
        if (enc.lo < required) {
            std::ostringstream os;
            os << ball_label(node) << ": measure lower bound " << format_double(enc.lo) << " < "
               << format_double(required);
            fail(measure, os.str());
        }
    }

    SchemeCheck disjoint{"level_disjointness", true, ""};
    for (int level = 1; level <= tree.depth(); ++level) {
        const DisjointnessResult r = level_disjointness(tree, level);
        if (!r.disjoint) {
            fail(disjoint, disjointness_message(level, r));
        }
    }

    SchemeCheck band{"child_count_band", true, ""};
    for (int level = 0; level < tree.depth(); ++level) {
        SchemeLevelReport lr;
        lr.level = level;
        lr.parents = tree.levels[level].size();
        lr.min_children = std::numeric_limits<std::size_t>::max();
        std::size_t total = 0;
        for (std::size_t id : tree.levels[level]) {
            const std::size_t n = tree.nodes[id].children.size();
            lr.min_children = std::min(lr.min_children, n);
            lr.max_children = std::max(lr.max_children, n);
            total += n;
        }
        if (lr.min_children == 0) {
            fail(band, "level " + std::to_string(level) + " has a childless node");
            lr.count_ratio = std::numeric_limits<double>::infinity();
        } else {
            lr.count_ratio = static_cast<double>(lr.max_children) / static_cast<double>(lr.min_children);
            lr.log2_mean_children = std::log2(static_cast<double>(total) / static_cast<double>(lr.parents));
        }
        const double mn = params.level_exponent(level);
        const double mn1 = params.level_exponent(level + 1);
        lr.log2_predicted = mn1 * (v + 1) * s - mn * (v + 1) * s - mn1 * (v - 1);
        if (lr.count_ratio > kChildCountBand) {
            fail(band, "level " + std::to_string(level) + ": child count ratio " + format_double(lr.count_ratio) +
                           " exceeds " + format_double(kChildCountBand));
        }
        report.levels.push_back(lr);
    }

    SchemeCheck approx{"approximations", true, ""};
    const auto paths = leaf_paths(tree);
    report.leaf_paths = paths.size();
    for (const auto& path : paths) {
        try {
            certify_approximations(tree, path);
        } catch (const std::logic_error& e) {
            fail(approx, e.what());
        }
    }

    report.checks = {nesting, containment, disjoint, radius, diameter, denominators, measure, band, approx};
    return report;
}

Json tree_to_json(const CantorTree& tree)
{
    Json maps = Json::array();
    for (const auto& f : tree.ifs.maps()) {
        maps.push_back({{"c", to_string(f.ratio)}, {"b", to_string(f.offset)}});
    }
    Json params = {{"v", to_string(tree.params.v)},
                   {"u", tree.params.u},
                   {"m0", tree.params.m0},
                   {"depth", tree.params.depth},
                   {"attractor_depth", tree.params.attractor_depth ? Json(*tree.params.attractor_depth) : Json()}};
    Json stats = Json::array();
    for (const auto& st : tree.stats) {
        stats.push_back({{"level", st.level},
                         {"m", st.m},
                         {"nodes", st.nodes},
                         {"min_children", st.min_children},
                         {"max_children", st.max_children},
                         {"dropped_undecided", st.dropped_undecided}});
    }
    auto node_json = [&](auto&& self, std::size_t id) -> Json {
        const CantorNode& n = tree.nodes[id];
        Json kids = Json::array();
        for (std::size_t c : n.children) {
            kids.push_back(self(self, c));
        }
        return {{"level", n.level},
                {"p", n.p},
                {"q", n.q},
                {"center", to_string(n.center)},
                {"radius", to_string(n.radius_lo)},
                {"radius_hi", to_string(n.radius_hi)},
                {"word", n.word.str()},
                {"children", kids}};
    };
    return {{"ifs", {{"maps", maps}}},
            {"params", params},
            {"normalization", {{"lo", to_string(tree.normalization.lo)}, {"hi", to_string(tree.normalization.hi)}}},
            {"stats", stats},
            {"root", node_json(node_json, 0)}};
}

CantorTree tree_from_json(const Json& json)
{
    try {
        std::vector<Affine1D> maps;
        for (const auto& m : json.at("ifs").at("maps")) {
            maps.push_back({parse_rational(m.at("c").get<std::string>()), parse_rational(m.at("b").get<std::string>())});
        }
        Ifs1D ifs(std::move(maps));
        SchemeParams params;
        const Json& pj = json.at("params");
        params.v = parse_rational(pj.at("v").get<std::string>());
        params.u = pj.at("u").get<int>();
        params.m0 = pj.at("m0").get<int>();
        params.depth = pj.at("depth").get<int>();
        if (pj.contains("attractor_depth") && !pj.at("attractor_depth").is_null()) {
            params.attractor_depth = pj.at("attractor_depth").get<int>();
        }
        params.validate();
        CantorTree tree{params,
                        ifs,
                        {},
                        {},
                        {},
                        {parse_rational(json.at("normalization").at("lo").get<std::string>()),
                         parse_rational(json.at("normalization").at("hi").get<std::string>())}};
        for (const auto& st : json.at("stats")) {
            tree.stats.push_back({st.at("level").get<int>(), st.at("m").get<int>(), st.at("nodes").get<std::size_t>(),
                                  st.at("min_children").get<std::size_t>(), st.at("max_children").get<std::size_t>(),
                                  st.at("dropped_undecided").get<std::uint64_t>()});
        }

        // Breadth-first, so node ids follow the level-by-level layout of build_scheme.
        std::deque<std::pair<const Json*, std::optional<std::size_t>>> queue{{&json.at("root"), std::nullopt}};
        while (!queue.empty()) {
            auto [nj, parent] = queue.front();
            queue.pop_front();
            CantorNode n;
            n.level = nj->at("level").get<int>();
            n.p = nj->at("p").get<std::int64_t>();
            n.q = nj->at("q").get<std::int64_t>();
            n.center = parse_rational(nj->at("center").get<std::string>());
            n.radius_lo = parse_rational(nj->at("radius").get<std::string>());
            n.radius_hi = parse_rational(nj->at("radius_hi").get<std::string>());
            n.word = Word::parse(ifs, nj->at("word").get<std::string>());
            n.parent = parent;
            const std::size_t id = tree.nodes.size();
            if (parent) {
                tree.nodes[*parent].children.push_back(id);
                if (n.level != tree.nodes[*parent].level + 1) {
                    throw std::invalid_argument("child level does not follow its parent");
                }
            } else if (n.level != 0) {
                throw std::invalid_argument("root must be at level 0");
            }
            if (static_cast<int>(tree.levels.size()) <= n.level) {
                tree.levels.resize(n.level + 1);
            }
            tree.levels[n.level].push_back(id);
            tree.nodes.push_back(std::move(n));
            for (const auto& c : nj->at("children")) {
                queue.emplace_back(&c, id);
            }
        }
        if (tree.depth() != params.depth) {
            throw std::invalid_argument("tree depth " + std::to_string(tree.depth()) + " does not match params");
        }
        return tree;
    } catch (const Json::exception& e) {
        throw std::invalid_argument(std::string("malformed tree: ") + e.what());
    } catch (const std::out_of_range& e) {
        throw std::invalid_argument(std::string("malformed tree: ") + e.what());
    }
}

Json scheme_report_json(const SchemeReport& report)
{
    Json checks = Json::array();
    for (const auto& c : report.checks) {
        checks.push_back({{"id", c.id}, {"passed", c.passed}, {"detail", c.detail}});
    }
    Json levels = Json::array();
    for (const auto& l : report.levels) {
        levels.push_back({{"level", l.level},
                          {"parents", l.parents},
                          {"min_children", l.min_children},
                          {"max_children", l.max_children},
                          {"count_ratio", round12(l.count_ratio)},
                          {"log2_mean_children", round12(l.log2_mean_children)},
                          {"log2_predicted", round12(l.log2_predicted)}});
    }
    return {{"passed", report.passed()},
            {"checks", checks},
            {"levels", levels},
            {"a1_hat", round12(report.a1_hat)},
            {"worst_measure_margin", round12(report.worst_measure_margin)},
            {"leaf_paths", report.leaf_paths}};
}

} // namespace vwak
