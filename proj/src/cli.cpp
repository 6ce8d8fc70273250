#include "vwak/cli.hpp"

#include "vwak/cantor.hpp"
#include "vwak/config.hpp"
#include "vwak/covers.hpp"
#include "vwak/estimators.hpp"
#include "vwak/mass.hpp"
#include "vwak/measure.hpp"
#include "vwak/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace vwak {

namespace {

/// A failed invariant; the identifier goes to the diagnostic stream.
struct Violation : std::runtime_error {
    Violation(std::string id, const std::string& message) : std::runtime_error(message), id(std::move(id)) {}
    std::string id;
};

struct Undecided : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string ifs;
    std::string out;
    unsigned workers = 0;
    std::string v = "2";
    std::string scale = "1";
    std::string family = "A";
    std::string levels;
    std::string window;
    std::string interval;
    std::string branch;
    std::optional<int> depth;
    std::optional<int> attractor_depth;
    bool check_disjoint = false;
    std::optional<double> l;
    std::optional<int> start;
    std::string v_list = "1,5/4,3/2,2,3,4";
    std::optional<std::string> s;
    int u = 2;
    int m0 = 3;
    int scheme_depth = 2;
    std::string tree;
    double t = 0.0;
    std::string scales;
    std::optional<double> epsilon;
    std::size_t centers = 64;
    std::string open_set;
};

void emit(const Options& o, std::ostream& out, const std::string& text)
{
    if (o.out.empty()) {
        out << text;
    } else {
        write_report(text, o.out);
    }
}

void emit(const Options& o, std::ostream& out, const Json& json)
{
    emit(o, out, dump_json(json));
}

Ifs1D ifs_of(const Options& o)
{
    if (o.ifs.empty()) {
        throw ConfigError("ifs", "--ifs is required");
    }
    return load_config(o.ifs);
}

ApproxSpec spec_of(const Options& o, bool require_above_one)
{
    return ApproxSpec::power_law(parse_exponent("v", o.v, require_above_one), parse_exponent("scale", o.scale, false));
}

IntervalQ interval_of(const std::string& field, const std::string& text)
{
    try {
        return parse_interval(text);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(field, e.what());
    }
}

Family family_of(const Options& o)
{
    try {
        return parse_family(o.family);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("family", e.what());
    }
}

LevelRange levels_of(const Options& o)
{
    if (o.levels.empty()) {
        throw ConfigError("m", "--m is required");
    }
    return parse_range("m", o.levels);
}

CantorTree tree_of(const Options& o)
{
    std::ifstream in(o.tree);
    if (!in) {
        throw ConfigError("tree", "cannot open " + o.tree);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return tree_from_json(Json::parse(buffer.str()));
    } catch (const Json::parse_error& e) {
        throw ConfigError("tree", e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError("tree", e.what());
    }
}

RegularityEstimate regularity_of(const SelfSimilarMeasure& mu, std::size_t centers)
{
    const Rational diam = mu.ifs().diameter();
    std::vector<Rational> scales;
    for (int k = 1; k <= 16; ++k) {
        scales.push_back(diam * pow2(-k));
    }
    const int depth = default_attractor_depth(mu.ifs(), scales.back()) + 4;
    return estimate_regularity(mu, centers, scales, depth);
}

void cmd_dim(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    const DimensionBracket b = solve_dimension_bracket(ifs);
    if (o.out.empty()) {
        out << format_double(b.value()) << "\n";
        return;
    }
    emit(o, out, Json{{"s", round12(b.value())}, {"s_lo", round12(b.lo)}, {"s_hi", round12(b.hi)}});
}

void cmd_hull(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    emit(o, out, to_string(ifs.hull()) + "\n");
}

void cmd_osc(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    const bool ok = o.open_set.empty() ? check_osc(ifs) : check_osc(ifs, interval_of("open", o.open_set));
    emit(o, out, std::string(ok ? "yes" : "no") + "\n");
    if (!ok) {
        throw Violation("OpenSetCondition", "images of the open set are not pairwise disjoint inside it");
    }
}

void cmd_measure(const Options& o, std::ostream& out)
{
    const SelfSimilarMeasure mu(ifs_of(o));
    const IntervalQ target = interval_of("interval", o.interval);
    const int depth = o.depth.value_or(20);
    MeasureEnclosure e;
    if (o.branch.empty()) {
        e = measure_interval(mu, target, depth);
    } else {
        e = branch_measure_interval(mu, Word::parse(mu.ifs(), o.branch), target, depth);
    }
    emit(o, out, Json{{"lo", round12(e.lo)}, {"hi", round12(e.hi)}, {"depth", e.depth}});
}

void cmd_hit(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    const Word root = o.branch.empty() ? Word() : Word::parse(ifs, o.branch);
    const AttractorQuery q = intersects_attractor(ifs, interval_of("interval", o.interval), o.depth, root);
    Json j = {{"answer", to_string(q.answer)}, {"max_depth", q.max_depth}, {"nodes", q.nodes_visited}};
    j["certificate"] = q.certificate ? Json(q.certificate->str()) : Json();
    emit(o, out, j);
    if (q.answer == TriBool::Undecided) {
        throw Undecided("no certificate within depth " + std::to_string(q.max_depth));
    }
}

void cmd_covers(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    const ApproxSpec spec = spec_of(o, false);
    const Family family = family_of(o);
    const LevelRange r = levels_of(o);
    const IntervalQ window = o.window.empty() ? ifs.hull() : interval_of("window", o.window);
    if (o.check_disjoint) {
        for (int m = r.first; m <= r.last; ++m) {
            const DisjointnessResult d = check_family_disjoint(spec, m, family, window);
            if (!d.disjoint) {
                std::ostringstream os;
                os << "level " << m << ": balls " << d.witness->first.p << "/" << d.witness->first.q << " and "
                   << d.witness->second.p << "/" << d.witness->second.q << " overlap";
                throw Violation("DisjointnessViolation", os.str());
            }
        }
    }
    const auto rows = count_table(ifs, spec, family, r.first, r.last, window, {o.attractor_depth, o.workers});
    emit(o, out, count_table_csv(rows));
}

void cmd_scaling(const Options& o, std::ostream& out)
{
    const SelfSimilarMeasure mu(ifs_of(o));
    const ApproxSpec spec = spec_of(o, false);
    const LevelRange r = levels_of(o);
    LevelScalingOptions opts;
    opts.depth = o.depth;
    opts.attractor_depth = o.attractor_depth;
    opts.workers = o.workers;
    const LevelScaling scaling = fit_level_scaling(mu, spec, family_of(o), r.first, r.last, opts);
    emit(o, out, level_scaling_csv(scaling));
    const Json summary = {{"slope", round12(scaling.fit.slope)},
                          {"intercept", round12(scaling.fit.intercept)},
                          {"r2", round12(scaling.fit.r2)},
                          {"dropped_levels", scaling.dropped_levels}};
    if (!o.out.empty()) {
        write_report(summary, o.out + ".summary.json");
    }
}

void cmd_critical(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    const ApproxSpec spec = spec_of(o, true);
    const LevelRange r = levels_of(o);
    const IntervalQ window = o.window.empty() ? ifs.hull() : interval_of("window", o.window);
    const double s = solve_dimension(ifs);
    const auto rows = count_table(ifs, spec, family_of(o), r.first, r.last, window, {o.attractor_depth, o.workers});
    const CriticalExponent ce = critical_exponent(rows, spec, s, r.first, r.last);
    const double l = o.l.value_or(ce.formula_value);
    const CoverSumReport sum = hausdorff_partial_sum(rows, spec, l, o.start.value_or(r.first));

    Json per_level = Json::array();
    for (std::size_t i = 0; i < sum.per_level.size(); ++i) {
        const auto& lm = sum.per_level[i];
        per_level.push_back({{"m", lm.m},
                             {"count", lm.count},
                             {"diameter", round12(lm.diameter)},
                             {"mass", round12(lm.mass)},
                             {"partial_sum", round12(sum.partial_sums[i])},
                             {"tail_sum", round12(sum.tail_sums[i])}});
    }
    emit(o, out,
         Json{{"l", round12(l)},
              {"verdict", to_string(sum.verdict)},
              {"mass_exponent", round12(sum.exponent)},
              {"per_level", per_level},
              {"l_star", round12(ce.l_star)},
              {"l_star_bracketed", round12(ce.l_star_bracketed)},
              {"count_slope", round12(ce.count_fit.slope)},
              {"expected_count_slope", round12(ce.expected_count_slope)},
              {"validated_regime", ce.validated_regime},
              {"formula_value", round12(ce.formula_value)},
              {"abs_gap", round12(ce.abs_gap)}});
}

void cmd_conjecture(const Options& o, std::ostream& out)
{
    double s = 0;
    if (o.s) {
        s = to_double(parse_exponent("s", *o.s, false));
    } else {
        s = solve_dimension(ifs_of(o));
    }
    std::vector<double> vs;
    std::stringstream list(o.v_list);
    for (std::string item; std::getline(list, item, ',');) {
        vs.push_back(to_double(parse_exponent("v-list", item, false)));
    }
    emit(o, out, conjecture_csv(conjecture_table(s, vs)));
}

void cmd_cantor_build(const Options& o, std::ostream& out)
{
    const Ifs1D ifs = ifs_of(o);
    SchemeParams params;
    params.v = parse_exponent("v", o.v, true);
    params.u = o.u;
    params.m0 = o.m0;
    params.depth = o.scheme_depth;
    params.attractor_depth = o.attractor_depth;
    params.workers = o.workers;
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("cantor", e.what());
    }
    CantorTree tree = [&] {
        try {
            return build_scheme(ifs, params);
        } catch (const SchemeError& e) {
            throw Violation(e.identifier(), e.what());
        }
    }();
    emit(o, out, tree_to_json(tree));
}

void cmd_cantor_verify(const Options& o, std::ostream& out)
{
    const CantorTree tree = tree_of(o);
    const SelfSimilarMeasure mu(tree.ifs);
    VerifyOptions opts;
    opts.measure_depth = o.depth;
    const SchemeReport report = verify_scheme(tree, mu, regularity_of(mu, o.centers), opts);
    emit(o, out, scheme_report_json(report));
    for (const auto& c : report.checks) {
        if (!c.passed) {
            throw Violation(c.id, c.detail);
        }
    }
}

void cmd_mass(const Options& o, std::ostream& out)
{
    CantorTree tree = tree_of(o);
    const double s = solve_dimension(tree.ifs);
    const MassTree mt(std::move(tree));
    emit(o, out, mass_report_json(mt, local_exponent_fit(mt, s)));
    for (const auto& total : mt.level_totals()) {
        if (total != 1) {
            throw Violation("MassConservation", "a level total differs from 1: " + to_string(total));
        }
    }
}

void cmd_frostman(const Options& o, std::ostream& out)
{
    const MassTree mt(tree_of(o));
    ScanSpec spec;
    if (!o.scales.empty()) {
        const LevelRange r = parse_range("scales", o.scales);
        spec.k_first = r.first;
        spec.k_last = r.last;
    }
    spec.epsilon = o.epsilon;
    spec.workers = o.workers;
    if (!(o.t >= 0)) {
        throw ConfigError("t", "must be >= 0");
    }
    const FrostmanReport report = frostman_scan(mt, o.t, spec);
    emit(o, out, frostman_report_json(report));
    if (!report.pass) {
        throw Violation("FrostmanBound", "m(U) > diam(U)^t for window " + to_string(report.witness));
    }
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Rational-ball covers and Cantor schemes on self-similar sets"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--workers", o.workers, "Worker threads (0 = all cores)");
        sub->add_option("--out", o.out, "Output file (written atomically); stdout if omitted");
    };
    auto with_ifs = [&](CLI::App* sub) { sub->add_option("--ifs", o.ifs, "IFS config file")->required(); };
    auto with_spec = [&](CLI::App* sub) {
        sub->add_option("--v", o.v, "Exponent v of psi(q) = scale * q^-v, as num/den");
        sub->add_option("--scale", o.scale, "Multiplier of psi, as num/den");
        sub->add_option("--family", o.family, "Denominator family A or D");
        sub->add_option("--m", o.levels, "Level range k1..k2")->required();
        sub->add_option("--attractor-depth", o.attractor_depth, "Absolute cylinder depth for classification");
    };

    auto* dim = app.add_subcommand("dim", "Similarity dimension");
    with_ifs(dim);
    common(dim);
    auto* hull = app.add_subcommand("hull", "Convex hull of the attractor");
    with_ifs(hull);
    common(hull);
    auto* osc = app.add_subcommand("osc", "Open set condition check");
    with_ifs(osc);
    osc->add_option("--open", o.open_set, "Witness open interval lo,hi (default: hull interior)");
    common(osc);
    auto* measure = app.add_subcommand("measure", "Enclosure of mu(interval)");
    with_ifs(measure);
    measure->add_option("--interval", o.interval, "Closed interval lo,hi")->required();
    measure->add_option("--depth", o.depth, "Word length cap (default 20)");
    measure->add_option("--branch", o.branch, "Use the branch measure of this word");
    common(measure);
    auto* hit = app.add_subcommand("hit", "Does the attractor meet an interval?");
    with_ifs(hit);
    hit->add_option("--interval", o.interval, "Closed interval lo,hi")->required();
    hit->add_option("--depth", o.depth, "Cylinder depth below the root word");
    hit->add_option("--branch", o.branch, "Restrict to the piece of this word");
    common(hit);
    auto* covers = app.add_subcommand("covers", "Per-level counts of family balls meeting the attractor");
    with_ifs(covers);
    with_spec(covers);
    covers->add_option("--window", o.window, "Window lo,hi (default: hull)");
    covers->add_flag("--check-disjoint", o.check_disjoint, "Also check exact pairwise disjointness per level");
    common(covers);
    auto* scaling = app.add_subcommand("scaling", "Measure of the level union against m");
    with_ifs(scaling);
    with_spec(scaling);
    scaling->add_option("--depth", o.depth, "Measure depth cap");
    common(scaling);
    auto* critical = app.add_subcommand("critical", "Cover sums and the critical exponent");
    with_ifs(critical);
    with_spec(critical);
    critical->add_option("--window", o.window, "Window lo,hi (default: hull)");
    critical->add_option("--l", o.l, "Exponent of the cover sum (default: closed form)");
    critical->add_option("--start", o.start, "First level of the cover sum (default: first level)");
    common(critical);
    auto* conjecture = app.add_subcommand("conjecture", "Two-branch dimension table over v");
    conjecture->add_option("--ifs", o.ifs, "IFS config file");
    conjecture->add_option("--s", o.s, "Dimension s instead of an IFS");
    conjecture->add_option("--v-list", o.v_list, "Comma-separated v values as num/den");
    common(conjecture);

    auto* cantor = app.add_subcommand("cantor", "Nested ball scheme");
    cantor->require_subcommand(1);
    auto* build = cantor->add_subcommand("build", "Build the scheme and dump it as JSON");
    with_ifs(build);
    build->add_option("--v", o.v, "Exponent v > 1, as num/den")->required();
    build->add_option("--u", o.u, "Level growth factor u >= 2");
    build->add_option("--m0", o.m0, "First level exponent M0 >= 1");
    build->add_option("--depth", o.scheme_depth, "Number of levels below the root");
    build->add_option("--attractor-depth", o.attractor_depth, "Absolute cylinder depth for classification");
    common(build);
    auto* verify = cantor->add_subcommand("verify", "Re-check a dumped scheme");
    verify->add_option("--tree", o.tree, "Tree JSON")->required();
    verify->add_option("--depth", o.depth, "Measure depth (default resolves each ball)");
    verify->add_option("--centers", o.centers, "Centres for the regularity estimate");
    common(verify);

    auto* mass = app.add_subcommand("mass", "Equal-split mass and its local exponent");
    mass->add_option("--tree", o.tree, "Tree JSON")->required();
    common(mass);
    auto* frostman = app.add_subcommand("frostman", "Scan m(U) <= diam(U)^t");
    frostman->add_option("--tree", o.tree, "Tree JSON")->required();
    frostman->add_option("--t", o.t, "Exponent t >= 0")->required();
    frostman->add_option("--scales", o.scales, "Window widths 2^-k for k in k1..k2");
    frostman->add_option("--epsilon", o.epsilon, "Diameter threshold (default: largest level-1 ball)");
    common(frostman);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (dim->parsed()) {
            cmd_dim(o, out);
        } else if (hull->parsed()) {
            cmd_hull(o, out);
        } else if (osc->parsed()) {
            cmd_osc(o, out);
        } else if (measure->parsed()) {
            cmd_measure(o, out);
        } else if (hit->parsed()) {
            cmd_hit(o, out);
        } else if (covers->parsed()) {
            cmd_covers(o, out);
        } else if (scaling->parsed()) {
            cmd_scaling(o, out);
        } else if (critical->parsed()) {
            cmd_critical(o, out);
        } else if (conjecture->parsed()) {
            cmd_conjecture(o, out);
        } else if (build->parsed()) {
            cmd_cantor_build(o, out);
        } else if (verify->parsed()) {
            cmd_cantor_verify(o, out);
        } else if (mass->parsed()) {
            cmd_mass(o, out);
        } else if (frostman->parsed()) {
            cmd_frostman(o, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Violation& e) {
        err << e.id << ": " << e.what() << "\n";
        return kExitViolation;
    } catch (const Undecided& e) {
        err << "undecided: " << e.what() << "\n";
        return kExitUndecided;
    } catch (const DegenerateFit& e) {
        err << "DegenerateFit: " << e.what() << "\n";
        return kExitViolation;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::out_of_range& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitViolation;
    }
    return kExitOk;
}

} // namespace vwak
