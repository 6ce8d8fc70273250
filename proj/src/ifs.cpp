#include "vwak/ifs.hpp"

#include "detail/cylinders.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vwak {

Affine1D Affine1D::compose(const Affine1D& inner) const
{
    return Affine1D{ratio * inner.ratio, ratio * inner.offset + offset};
}

IntervalQ Affine1D::image(const IntervalQ& interval) const
{
    return IntervalQ{(*this)(interval.lo), (*this)(interval.hi), interval.lo_open, interval.hi_open};
}

IntervalQ Affine1D::preimage(const IntervalQ& interval) const
{
    return IntervalQ{inverse(interval.lo), inverse(interval.hi), interval.lo_open, interval.hi_open};
}

Ifs1D::Ifs1D(std::vector<Affine1D> maps) : maps_(std::move(maps))
{
    if (maps_.empty()) {
        throw std::invalid_argument("IFS needs at least one map");
    }
    for (std::size_t i = 0; i < maps_.size(); ++i) {
        auto& m = maps_[i];
        m.ratio.canonicalize();
        m.offset.canonicalize();
        if (m.ratio <= 0 || m.ratio >= 1) {
            throw std::invalid_argument("map " + std::to_string(i + 1) + ": ratio " + to_string(m.ratio) +
                                        " is outside (0,1)");
        }
    }
    std::stable_sort(maps_.begin(), maps_.end(), [](const Affine1D& x, const Affine1D& y) {
        return x.ratio < y.ratio || (x.ratio == y.ratio && x.offset < y.offset);
    });
    max_ratio_ = maps_.back().ratio;
    Rational lo = maps_.front().fixed_point();
    Rational hi = lo;
    for (const auto& m : maps_) {
        const Rational fp = m.fixed_point();
        lo = std::min(lo, fp);
        hi = std::max(hi, fp);
    }
    hull_ = IntervalQ::closed(lo, hi);
}

const Affine1D& Ifs1D::map(int symbol) const
{
    if (symbol < 1 || static_cast<std::size_t>(symbol) > maps_.size()) {
        throw std::out_of_range("symbol " + std::to_string(symbol) + " outside 1.." + std::to_string(maps_.size()));
    }
    return maps_[static_cast<std::size_t>(symbol - 1)];
}

Word::Word(const Ifs1D& ifs, std::vector<int> symbols) : symbols_(std::move(symbols))
{
    map_ = compose_word(ifs, symbols_);
}

Word Word::extended(const Ifs1D& ifs, int symbol) const
{
    Word out;
    out.symbols_ = symbols_;
    out.symbols_.push_back(symbol);
    out.map_ = map_.compose(ifs.map(symbol));
    return out;
}

Word Word::truncated(const Ifs1D& ifs, std::size_t n) const
{
    n = std::min(n, symbols_.size());
    return Word(ifs, std::vector<int>(symbols_.begin(), symbols_.begin() + static_cast<std::ptrdiff_t>(n)));
}

std::string Word::str() const
{
    std::string out;
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        if (i) {
            out += ',';
        }
        out += std::to_string(symbols_[i]);
    }
    return out;
}

Word Word::parse(const Ifs1D& ifs, std::string_view text)
{
    std::vector<int> symbols;
    std::string token;
    std::istringstream in{std::string(text)};
    while (std::getline(in, token, ',')) {
        token.erase(std::remove_if(token.begin(), token.end(), [](char ch) { return ch == ' ' || ch == '\t'; }),
                    token.end());
        if (token.empty()) {
            continue;
        }
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(token, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("malformed word symbol '" + token + "'");
        }
        if (used != token.size()) {
            throw std::invalid_argument("malformed word symbol '" + token + "'");
        }
        symbols.push_back(value);
    }
    return Word(ifs, std::move(symbols));
}

bool is_prefix(const Word& a, const Word& b)
{
    const auto& x = a.symbols();
    const auto& y = b.symbols();
    return x.size() <= y.size() && std::equal(x.begin(), x.end(), y.begin());
}

bool is_strict_prefix(const Word& a, const Word& b)
{
    return a.length() < b.length() && is_prefix(a, b);
}

DimensionBracket solve_dimension_bracket(const Ifs1D& ifs, double tol)
{
    if (!(tol > 0)) {
        throw std::invalid_argument("solve_dimension: tol must be positive");
    }
    const auto l = static_cast<double>(ifs.size());
    if (ifs.size() == 1) {
        return {0.0, 0.0};
    }
    std::vector<double> logs;
    for (const auto& m : ifs.maps()) {
        logs.push_back(std::log(to_double(m.ratio)));
    }
    const auto excess = [&](double s) {
        double sum = 0.0;
        for (double lc : logs) {
            sum += std::exp(s * lc);
        }
        return sum - 1.0;
    };
    // sum c_i^s is decreasing; l * cmin^s <= sum <= l * cmax^s.
    double lo = std::log(l) / -logs.front();
    double hi = std::log(l) / -std::log(to_double(ifs.max_ratio()));
    lo = std::nextafter(lo, 0.0);
    hi = std::nextafter(hi, INFINITY);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (excess(mid) > 0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return {lo, hi};
}

double solve_dimension(const Ifs1D& ifs, double tol)
{
    return solve_dimension_bracket(ifs, tol).value();
}

Affine1D compose_word(const Ifs1D& ifs, std::span<const int> symbols)
{
    Affine1D out;
    for (int symbol : symbols) {
        out = out.compose(ifs.map(symbol));
    }
    return out;
}

IntervalQ attractor_hull(const Ifs1D& ifs)
{
    return ifs.hull();
}

bool check_osc(const Ifs1D& ifs, const IntervalQ& open_set)
{
    const IntervalQ u = open_set.interior();
    if (u.empty()) {
        return false;
    }
    std::vector<IntervalQ> images;
    for (const auto& m : ifs.maps()) {
        images.push_back(m.image(u));
        if (!u.contains(images.back())) {
            return false;
        }
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t j = i + 1; j < images.size(); ++j) {
            if (images[i].intersects(images[j])) {
                return false;
            }
        }
    }
    return true;
}

bool check_osc(const Ifs1D& ifs)
{
    return check_osc(ifs, ifs.hull().interior());
}

IntervalQ code_point(const Ifs1D& ifs, const Word& prefix)
{
    return prefix.map().image(ifs.hull());
}

int default_attractor_depth(const Ifs1D& ifs, const Rational& width)
{
    const double diam = to_double(ifs.diameter());
    const double w = to_double(width);
    if (!(w > 0) || !(diam > 0) || w >= diam) {
        return 8;
    }
    const double levels = std::ceil(std::log(w / diam) / std::log(to_double(ifs.max_ratio())));
    return std::max(8, static_cast<int>(levels) + 8);
}

AttractorQuery intersects_attractor(const Ifs1D& ifs, const IntervalQ& target, std::optional<int> max_depth,
                                    const Word& root)
{
    int depth = 0;
    if (max_depth) {
        if (*max_depth < 0) {
            throw std::invalid_argument("intersects_attractor: max_depth must be >= 0");
        }
        depth = *max_depth;
    } else {
        depth = default_attractor_depth(ifs, target.width() / root.ratio());
    }
    const detail::CylinderKernel kernel(ifs);
    detail::Target t = detail::Target::from_exact(target, target);
    detail::Cursor cursor = kernel.cursor(root.symbols());
    const auto outcome = kernel.classify(t, static_cast<int>(root.length()) + depth, cursor);

    AttractorQuery out;
    out.answer = outcome.answer;
    out.max_depth = depth;
    out.nodes_visited = outcome.nodes;
    if (outcome.answer == TriBool::Yes) {
        out.certificate = Word(ifs, outcome.certificate);
    }
    return out;
}

Word find_branch(const Ifs1D& ifs, const Word& base, const Word& target_code, const Rational& max_diameter)
{
    if (max_diameter <= 0) {
        throw std::invalid_argument("find_branch: Q must be positive");
    }
    if (!is_prefix(base, target_code)) {
        throw std::invalid_argument("find_branch: target code does not extend the base word");
    }
    const Rational diam = ifs.diameter();
    const Rational floor_value = ifs.min_ratio() * max_diameter;
    if (base.ratio() * diam < floor_value) {
        throw std::invalid_argument("find_branch: Q exceeds diam(supp mu_base) / c_1");
    }
    Affine1D map = base.map();
    const auto& symbols = target_code.symbols();
    for (std::size_t n = base.length();; ++n) {
        const Rational width = map.ratio * diam;
        if (width <= max_diameter) {
            if (width < floor_value) {
                // Unreachable when the precondition holds, since each step shrinks by at most c_1.
                throw std::logic_error("find_branch: diameter window skipped");
            }
            return target_code.truncated(ifs, n);
        }
        if (n == symbols.size()) {
            throw std::length_error("find_branch: target code too short to reach diameter " +
                                    to_string(max_diameter));
        }
        map = map.compose(ifs.map(symbols[n]));
    }
}

} // namespace vwak
