#include "vwak/covers.hpp"

#include "detail/cylinders.hpp"
#include "detail/farey.hpp"
#include "detail/parallel.hpp"
#include "vwak/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace vwak {

namespace {

constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
constexpr std::int64_t kChunk = 64;

Rational ratio_of(std::int64_t p, std::int64_t q)
{
    Rational out(Integer(static_cast<long>(p)), Integer(static_cast<long>(q)));
    out.canonicalize();
    return out;
}

std::int64_t to_int64(const Integer& value)
{
    if (!value.fits_slong_p()) {
        throw std::overflow_error("integer " + value.get_str() + " exceeds 64 bits");
    }
    return value.get_si();
}

/// Integers p with the closed ball of radius psi/q around p/q meeting the
/// closed window: q*lo - psi <= p <= q*hi + psi.
std::pair<std::int64_t, std::int64_t> window_p_range(std::int64_t q, const IntervalQ& window, const Rational& psi)
{
    const Rational qq(Integer(static_cast<long>(q)));
    return {to_int64(ceil(qq * window.lo - psi)), to_int64(floor(qq * window.hi + psi))};
}

/// Absolute cylinder depth cap for classifying a ball of the given diameter
/// below `root`.
int classification_cap(const Ifs1D& ifs, const Word& root, const Rational& diameter, std::optional<int> depth)
{
    if (depth) {
        return *depth;
    }
    return static_cast<int>(root.length()) + default_attractor_depth(ifs, diameter / root.ratio());
}

std::int64_t clamp_to_int64(double x)
{
    constexpr double limit = 9.0e18;
    if (!(x > -limit)) {
        return -static_cast<std::int64_t>(limit);
    }
    if (!(x < limit)) {
        return static_cast<std::int64_t>(limit);
    }
    return static_cast<std::int64_t>(x);
}

struct LevelContext {
    const Ifs1D& ifs;
    const detail::CylinderKernel& kernel;
    const Word& root;
    const IntervalQ& window;
    Bracket psi;
    int m;
    Family family;
    std::optional<int> depth;
    const detail::FactorSieve* sieve;
};

struct ChunkResult {
    std::vector<ClassifiedBall> hits;
    std::vector<ClassifiedBall> undecided;
    std::uint64_t count_all = 0;
    WalkCounters counters;
    int depth = 0;
};

class QWalker {
public:
    QWalker(const LevelContext& ctx, std::int64_t q, ChunkResult& out) : ctx_(ctx), q_(q), out_(out)
    {
        qd_ = static_cast<double>(q);
        radius_lo_ = ctx.psi.lo / Rational(Integer(static_cast<long>(q)));
        radius_hi_ = ctx.psi.hi / Rational(Integer(static_cast<long>(q)));
        radius_lo_dn_ = lower_double(radius_lo_);
        radius_lo_up_ = upper_double(radius_lo_);
        radius_hi_up_ = upper_double(radius_hi_);
        psi_hi_up_ = upper_double(ctx.psi.hi);
        std::tie(p_min_, p_max_) = window_p_range(q, ctx.window, ctx.psi.hi);
        cap_ = classification_cap(ctx.ifs, ctx.root, 2 * radius_hi_, ctx.depth);
        out_.depth = std::max(out_.depth, cap_);
    }

    void run()
    {
        if (p_min_ > p_max_) {
            return;
        }
        const auto primes = ctx_.sieve ? ctx_.sieve->primes_of(q_) : detail::prime_factors(q_);
        out_.count_all += static_cast<std::uint64_t>(detail::count_coprime(p_min_, p_max_, primes));
        detail::Cursor cur = ctx_.kernel.cursor(ctx_.root.symbols());
        walk(cur);
        for (auto& [p, entry] : entries_) {
            if (entry.status == TriBool::No) {
                continue;
            }
            ClassifiedBall cb;
            cb.ball = make_ball(p, q_, ctx_.m, ctx_.family, ctx_.psi);
            cb.status = entry.status;
            cb.certificate = std::move(entry.certificate);
            (entry.status == TriBool::Yes ? out_.hits : out_.undecided).push_back(std::move(cb));
        }
    }

private:
    struct Entry {
        TriBool status = TriBool::No;
        std::vector<int> certificate;
    };

    void walk(detail::Cursor& cur)
    {
        ++out_.counters.nodes;
        double clo, chi, err;
        if (ctx_.kernel.reliable(cur)) {
            clo = ctx_.kernel.lo(cur);
            chi = ctx_.kernel.hi(cur);
            err = ctx_.kernel.error(cur);
        } else {
            const IntervalQ cyl = ctx_.kernel.exact_cylinder(cur);
            clo = lower_double(cyl.lo);
            chi = upper_double(cyl.hi);
            err = 0;
        }
        // Generous integer range of p whose upper-radius ball can meet this cylinder.
        const double slack = 8 * kUnit * ((std::fabs(clo) + std::fabs(chi) + err) * qd_ + psi_hi_up_ + 1);
        std::int64_t a = clamp_to_int64(std::ceil(qd_ * (clo - err) - psi_hi_up_ - slack));
        std::int64_t b = clamp_to_int64(std::floor(qd_ * (chi + err) + psi_hi_up_ + slack));
        a = std::max(a, p_min_);
        b = std::min(b, p_max_);
        if (a > b) {
            return;
        }
        const double width_lower = (chi - clo) - 2 * err;
        const bool descend = static_cast<int>(cur.symbols.size()) < cap_ && qd_ * (chi - clo) >= 1.0 &&
                             width_lower > 2 * radius_lo_up_ * (1 + 8 * kUnit);
        if (!descend) {
            classify_leaf(cur, a, b);
            return;
        }
        const double c = cur.c;
        const double bb = cur.b;
        for (std::size_t s = 1; s <= ctx_.kernel.arity(); ++s) {
            ctx_.kernel.push(cur, static_cast<int>(s));
            walk(cur);
            ctx_.kernel.pop(cur, c, bb);
        }
    }

    void classify_leaf(detail::Cursor& cur, std::int64_t a, std::int64_t b)
    {
        for (std::int64_t p = a; p <= b; ++p) {
            if (std::gcd(p, q_) != 1) {
                continue;
            }
            Entry& entry = entries_[p];
            if (entry.status == TriBool::Yes) {
                continue;
            }
            ++out_.counters.candidates;
            detail::Target target = detail::Target::ball(p, q_, radius_lo_, radius_hi_, radius_lo_dn_, radius_hi_up_);
            const detail::Outcome outcome = ctx_.kernel.classify(target, cap_, cur);
            out_.counters.kernel_nodes += outcome.nodes;
            out_.counters.exact_fallbacks += outcome.exact_fallbacks;
            if (outcome.answer == TriBool::Yes) {
                entry.status = TriBool::Yes;
                entry.certificate = outcome.certificate;
            } else if (outcome.answer == TriBool::Undecided) {
                entry.status = TriBool::Undecided;
            }
        }
    }

    const LevelContext& ctx_;
    std::int64_t q_;
    ChunkResult& out_;
    double qd_;
    Rational radius_lo_, radius_hi_;
    double radius_lo_dn_, radius_lo_up_, radius_hi_up_, psi_hi_up_;
    std::int64_t p_min_ = 0, p_max_ = -1;
    int cap_ = 0;
    std::map<std::int64_t, Entry> entries_;
};

bool has_positive_radius(const Bracket& psi)
{
    return psi.hi > 0;
}

} // namespace

std::string to_string(Family family)
{
    return family == Family::A ? "A" : "D";
}

Family parse_family(std::string_view text)
{
    if (text == "A" || text == "a") {
        return Family::A;
    }
    if (text == "D" || text == "d") {
        return Family::D;
    }
    throw std::invalid_argument("family must be A or D, got '" + std::string(text) + "'");
}

QRange q_range(Family family, int m)
{
    if (m < 1 || m > 60) {
        throw std::invalid_argument("level m must be in 1..60, got " + std::to_string(m));
    }
    const std::int64_t low = std::int64_t{1} << m;
    if (family == Family::A) {
        return {low, low * 2};
    }
    return {low / 2, low};
}

Rational RationalBall::center() const
{
    return ratio_of(p, q);
}

RationalBall make_ball(std::int64_t p, std::int64_t q, int m, Family family, const Bracket& psi)
{
    RationalBall ball;
    ball.p = p;
    ball.q = q;
    ball.m = m;
    ball.family = family;
    const Rational qq(Integer(static_cast<long>(q)));
    ball.radius_lo = psi.lo / qq;
    ball.radius_hi = psi.hi / qq;
    return ball;
}

std::vector<RationalBall> enumerate_balls(const ApproxSpec& spec, int m, Family family, const IntervalQ& window)
{
    const QRange range = q_range(family, m);
    const Bracket psi = spec.at_level(m);
    std::vector<RationalBall> out;
    if (!has_positive_radius(psi)) {
        return out;
    }
    for (std::int64_t q = range.first; q < range.last; ++q) {
        const auto [lo, hi] = window_p_range(q, window, psi.hi);
        for (std::int64_t p = lo; p <= hi; ++p) {
            if (std::gcd(p, q) == 1) {
                out.push_back(make_ball(p, q, m, family, psi));
            }
        }
    }
    return out;
}

CoverLevel filter_attractor_hits(const Ifs1D& ifs, const std::vector<RationalBall>& balls, std::optional<int> depth)
{
    CoverLevel level;
    if (!balls.empty()) {
        level.m = balls.front().m;
        level.family = balls.front().family;
    }
    const detail::CylinderKernel kernel(ifs);
    const Word root;
    for (const auto& ball : balls) {
        const int cap = classification_cap(ifs, root, 2 * ball.radius_hi, depth);
        level.depth = std::max(level.depth, cap);
        detail::Target target = detail::Target::ball(ball.p, ball.q, ball.radius_lo, ball.radius_hi,
                                                     lower_double(ball.radius_lo), upper_double(ball.radius_hi));
        detail::Cursor cur;
        const detail::Outcome outcome = kernel.classify(target, cap, cur);
        ClassifiedBall cb{ball, outcome.answer, outcome.certificate};
        switch (outcome.answer) {
        case TriBool::Yes:
            level.hits.push_back(std::move(cb));
            break;
        case TriBool::No:
            level.misses.push_back(std::move(cb));
            break;
        case TriBool::Undecided:
            level.undecided.push_back(std::move(cb));
            break;
        }
    }
    level.miss_count = level.misses.size();
    level.count_all = balls.size();
    return level;
}

CoverLevel enumerate_near_attractor(const Ifs1D& ifs, const ApproxSpec& spec, int m, Family family,
                                    const IntervalQ& window, const LocalEnumeration& options, WalkCounters* counters)
{
    const QRange range = q_range(family, m);
    CoverLevel level;
    level.m = m;
    level.family = family;
    const Bracket psi = spec.at_level(m);
    if (!has_positive_radius(psi)) {
        return level;
    }
    const detail::CylinderKernel kernel(ifs);
    std::optional<detail::FactorSieve> sieve;
    if (range.last <= (std::int64_t{1} << 26)) {
        sieve.emplace(range.last);
    }
    const LevelContext ctx{ifs, kernel, options.root, window, psi, m, family, options.depth,
                           sieve ? &*sieve : nullptr};

    const std::int64_t span = range.last - range.first;
    const auto chunks = static_cast<std::size_t>((span + kChunk - 1) / kChunk);
    std::vector<ChunkResult> results(chunks);
    detail::parallel_for(chunks, options.workers, [&](std::size_t chunk) {
        const std::int64_t first = range.first + static_cast<std::int64_t>(chunk) * kChunk;
        const std::int64_t last = std::min(range.last, first + kChunk);
        for (std::int64_t q = first; q < last; ++q) {
            QWalker(ctx, q, results[chunk]).run();
        }
    });

    WalkCounters total;
    for (auto& r : results) {
        level.count_all += r.count_all;
        level.depth = std::max(level.depth, r.depth);
        std::move(r.hits.begin(), r.hits.end(), std::back_inserter(level.hits));
        std::move(r.undecided.begin(), r.undecided.end(), std::back_inserter(level.undecided));
        total.nodes += r.counters.nodes;
        total.candidates += r.counters.candidates;
        total.kernel_nodes += r.counters.kernel_nodes;
        total.exact_fallbacks += r.counters.exact_fallbacks;
    }
    level.miss_count = level.count_all - level.hits.size() - level.undecided.size();
    if (counters) {
        *counters = total;
    }
    return level;
}

std::uint64_t count_family(const ApproxSpec& spec, int m, Family family, const IntervalQ& window)
{
    const QRange range = q_range(family, m);
    const Bracket psi = spec.at_level(m);
    if (!has_positive_radius(psi)) {
        return 0;
    }
    std::optional<detail::FactorSieve> sieve;
    if (range.last <= (std::int64_t{1} << 26)) {
        sieve.emplace(range.last);
    }
    std::uint64_t total = 0;
    for (std::int64_t q = range.first; q < range.last; ++q) {
        const auto [lo, hi] = window_p_range(q, window, psi.hi);
        const auto primes = sieve ? sieve->primes_of(q) : detail::prime_factors(q);
        total += static_cast<std::uint64_t>(detail::count_coprime(lo, hi, primes));
    }
    return total;
}

DisjointnessResult check_pairwise_disjoint(const std::vector<RationalBall>& balls)
{
    DisjointnessResult out;
    out.balls = balls.size();
    std::vector<std::size_t> order(balls.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const __int128 lhs = static_cast<__int128>(balls[i].p) * balls[j].q;
        const __int128 rhs = static_cast<__int128>(balls[j].p) * balls[i].q;
        return lhs < rhs || (lhs == rhs && i < j);
    });
    std::optional<Rational> max_right;
    std::size_t max_index = 0;
    std::optional<Rational> previous_right;
    for (std::size_t k = 0; k < order.size(); ++k) {
        const RationalBall& ball = balls[order[k]];
        const Rational center = ball.center();
        const Rational left = center - ball.radius_hi;
        const Rational right = center + ball.radius_hi;
        if (previous_right) {
            const Rational gap = left - *previous_right;
            if (!out.min_gap || gap < *out.min_gap) {
                out.min_gap = gap;
            }
        }
        if (max_right && left <= *max_right && out.disjoint) {
            out.disjoint = false;
            out.witness = std::make_pair(balls[max_index], ball);
        }
        if (!max_right || right > *max_right) {
            max_right = right;
            max_index = order[k];
        }
        previous_right = right;
    }
    return out;
}

namespace {

/// Sign of d - psi * k for integers d, k >= 0 and rational psi, filtered in
/// double and settled exactly when close.
int compare_scaled(__int128 d, const Rational& psi, double psi_dn, double psi_up, std::int64_t k)
{
    const auto dd = static_cast<double>(d);
    const double kd = static_cast<double>(k);
    const double rhs_up = psi_up * kd * (1 + 4 * kUnit);
    const double rhs_dn = psi_dn * kd * (1 - 4 * kUnit);
    if (dd * (1 - 2 * kUnit) > rhs_up) {
        return 1;
    }
    if (dd * (1 + 2 * kUnit) < rhs_dn) {
        return -1;
    }
    const Rational lhs(Integer(static_cast<long>(d)));
    const Rational rhs = psi * Rational(Integer(static_cast<long>(k)));
    return lhs > rhs ? 1 : (lhs < rhs ? -1 : 0);
}

} // namespace

DisjointnessResult check_family_disjoint(const ApproxSpec& spec, int m, Family family, const IntervalQ& window)
{
    DisjointnessResult out;
    const QRange range = q_range(family, m);
    const Bracket psi = spec.at_level(m);
    if (!has_positive_radius(psi)) {
        return out;
    }
    const Rational& phi = psi.hi;
    const double phi_dn = lower_double(phi);
    const double phi_up = upper_double(phi);

    std::vector<std::pair<std::int64_t, std::int64_t>> p_bounds;
    p_bounds.reserve(static_cast<std::size_t>(range.last - range.first));
    for (std::int64_t q = range.first; q < range.last; ++q) {
        p_bounds.push_back(window_p_range(q, window, phi));
    }
    const std::int64_t order = range.last - 1;
    const std::int64_t start = to_int64(floor(window.lo - phi)) - 1;
    // One unit past the last term that can matter, so a double test suffices.
    const double stop_value = upper_double(window.hi + phi) + 1;

    struct Term {
        std::int64_t p, q;
    };
    std::optional<Term> previous;
    std::optional<Term> widest; // ball with the largest right endpoint so far
    double best_gap_d = std::numeric_limits<double>::infinity();

    const auto gap_exact = [&](const Term& a, const Term& b) {
        const __int128 det = static_cast<__int128>(b.p) * a.q - static_cast<__int128>(a.p) * b.q;
        Rational g = (Rational(Integer(static_cast<long>(det))) - phi * Rational(Integer(static_cast<long>(a.q + b.q)))) /
                     Rational(Integer(static_cast<long>(a.q)) * Integer(static_cast<long>(b.q)));
        return g;
    };

    for (detail::FareyStream farey(order, start);; farey.next()) {
        const std::int64_t p = farey.p();
        const std::int64_t q = farey.q();
        if (static_cast<double>(p) / static_cast<double>(q) > stop_value) {
            break;
        }
        if (q < range.first) {
            continue;
        }
        const auto& bounds = p_bounds[static_cast<std::size_t>(q - range.first)];
        if (p < bounds.first) {
            continue;
        }
        if (p > bounds.second) {
            continue;
        }
        const Term term{p, q};
        ++out.balls;
        if (previous) {
            const __int128 det = static_cast<__int128>(p) * previous->q - static_cast<__int128>(previous->p) * q;
            const double span = static_cast<double>(previous->q) * static_cast<double>(q);
            const double shift = phi_dn * static_cast<double>(previous->q + q);
            const double g = (static_cast<double>(det) - shift) / span;
            const double tol = 1e-12 * (static_cast<double>(det) + shift) / span;
            if (!out.min_gap || g <= best_gap_d + tol) {
                const Rational exact = gap_exact(*previous, term);
                if (!out.min_gap || exact < *out.min_gap) {
                    out.min_gap = exact;
                    best_gap_d = std::min(best_gap_d, g);
                }
            }
        }
        if (widest) {
            const __int128 det = static_cast<__int128>(p) * widest->q - static_cast<__int128>(widest->p) * q;
            // Closed balls overlap iff det <= phi * (q_i + q_j).
            if (out.disjoint && compare_scaled(det, phi, phi_dn, phi_up, widest->q + q) <= 0) {
                out.disjoint = false;
                out.witness = std::make_pair(make_ball(widest->p, widest->q, m, family, psi),
                                             make_ball(p, q, m, family, psi));
            }
            // New right endpoint is larger iff det > phi * (q_j - q_i).
            const std::int64_t k = q - widest->q;
            bool larger;
            if (k <= 0) {
                larger = true; // det >= 1 > phi * k
            } else {
                larger = compare_scaled(det, phi, phi_dn, phi_up, k) > 0;
            }
            if (larger) {
                widest = term;
            }
        } else {
            widest = term;
        }
        previous = term;
    }
    return out;
}

std::vector<CountRow> count_table(const Ifs1D& ifs, const ApproxSpec& spec, Family family, int m_first, int m_last,
                                  const IntervalQ& window, const CountTableOptions& options)
{
    if (m_first > m_last) {
        throw std::invalid_argument("count_table: empty level range");
    }
    std::vector<CountRow> rows;
    for (int m = m_first; m <= m_last; ++m) {
        LocalEnumeration opts;
        opts.depth = options.depth;
        opts.workers = options.workers;
        const CoverLevel level = enumerate_near_attractor(ifs, spec, m, family, window, opts);
        CountRow row;
        row.m = m;
        row.count_all = level.count_all;
        row.count_hits = level.hits.size();
        row.count_undecided = level.undecided.size();
        const Bracket psi = spec.at_level(m);
        row.log2_radius_hi = psi.hi > 0 ? log2_of(psi.hi) - m : -std::numeric_limits<double>::infinity();
        rows.push_back(row);
    }
    return rows;
}

std::string count_table_csv(const std::vector<CountRow>& rows)
{
    std::string out = "m,count_all,count_hits,count_undecided,log2_radius_hi\n";
    for (const auto& r : rows) {
        out += std::to_string(r.m) + "," + std::to_string(r.count_all) + "," + std::to_string(r.count_hits) + "," +
               std::to_string(r.count_undecided) + "," + format_double(r.log2_radius_hi) + "\n";
    }
    return out;
}

} // namespace vwak
