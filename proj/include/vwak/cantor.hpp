#pragma once

// Nested families of disjoint rational balls around the attractor, each ball
// paired with a branch word whose cylinder sits well inside it.
//
// Level n uses denominators 2^(M_n - 1) <= q < 2^M_n with M_n = M0 * u^n and
// radius q^(-1) 2^(-M_n v). Children of a node with word alpha are the balls
// whose third (radius divided by 3) meets f_alpha(K).

#include "vwak/covers.hpp"
#include "vwak/ifs.hpp"
#include "vwak/measure.hpp"
#include "vwak/report.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vwak {

struct SchemeParams {
    Rational v{5, 4};
    int u = 2;
    int m0 = 3;
    int depth = 2;
    /// Absolute classification depth for candidate balls; default per ball.
    std::optional<int> attractor_depth;
    unsigned workers = 0;

    /// M_n = M0 * u^n. Throws std::invalid_argument when it exceeds 60.
    int level_exponent(int n) const;
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct CantorNode {
    int level = 0;
    std::int64_t p = 0;
    std::int64_t q = 1;
    Rational center;
    Rational radius_lo;
    Rational radius_hi;
    Word word;
    std::optional<std::size_t> parent;
    std::vector<std::size_t> children;

    IntervalQ closed_hi() const { return IntervalQ::ball(center, radius_hi); }
    IntervalQ open_lo() const { return IntervalQ::open_ball(center, radius_lo); }
};

struct LevelStats {
    int level = 0;
    int m = 0;
    std::size_t nodes = 0;
    std::size_t min_children = 0;
    std::size_t max_children = 0;
    /// Candidate balls dropped because classification hit the depth cap.
    std::uint64_t dropped_undecided = 0;
};

struct CantorTree {
    SchemeParams params;
    Ifs1D ifs;
    /// Node 0 is the root; nodes are stored level by level, children sorted
    /// by (q, p) within each parent.
    std::vector<CantorNode> nodes;
    std::vector<std::vector<std::size_t>> levels;
    /// Statistics for parents at each level 0..depth-1.
    std::vector<LevelStats> stats;
    Bracket normalization; // L = max{1, 3 * 2^(M0 (v+1)) * diam}

    const CantorNode& root() const { return nodes.front(); }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

class SchemeError : public std::runtime_error {
public:
    enum class Kind { ZeroChildren, DisjointnessViolation, ContainmentViolation };
    SchemeError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
    Kind kind() const { return kind_; }
    std::string identifier() const;

private:
    Kind kind_;
};

/// Throws SchemeError for a structural failure and std::invalid_argument
/// for bad parameters or an IFS without the open set condition.
CantorTree build_scheme(const Ifs1D& ifs, const SchemeParams& params);

struct SchemeCheck {
    std::string id;
    bool passed = true;
    std::string detail;
};

struct SchemeLevelReport {
    int level = 0;
    std::size_t parents = 0;
    std::size_t min_children = 0;
    std::size_t max_children = 0;
    double count_ratio = 0.0;
    double log2_mean_children = 0.0;
    /// M_{n+1}(v+1)s - M_n(v+1)s - M_{n+1}(v-1).
    double log2_predicted = 0.0;
};

struct SchemeReport {
    std::vector<SchemeCheck> checks;
    std::vector<SchemeLevelReport> levels;
    double a1_hat = 0.0;
    /// Smallest measure-lower-bound / required ratio over all balls.
    double worst_measure_margin = 0.0;
    std::size_t leaf_paths = 0;
    bool passed() const;
};

/// Largest allowed max/min per-parent child-count ratio.
inline constexpr double kChildCountBand = 64.0;

struct VerifyOptions {
    /// Measure depth for the (A) bound; default resolves each ball.
    std::optional<int> measure_depth;
};

SchemeReport verify_scheme(const CantorTree& tree, const SelfSimilarMeasure& mu, const RegularityEstimate& regularity,
                           const VerifyOptions& options = {});

/// Intersection of the open lower-radius balls along a root-to-node path of
/// child indices. Throws std::out_of_range for an invalid path.
IntervalQ leaf_enclosure(const CantorTree& tree, const std::vector<std::size_t>& path);

struct Approximation {
    std::int64_t p = 0;
    std::int64_t q = 1;
    int level = 0;
};

/// Verifies |q x - p| < psi(q) for every x of the leaf enclosure at each
/// ancestor ball. Throws std::logic_error on failure.
std::vector<Approximation> certify_approximations(const CantorTree& tree, const std::vector<std::size_t>& path);

/// All root-to-deepest-level paths in tree order.
std::vector<std::vector<std::size_t>> leaf_paths(const CantorTree& tree);

Json tree_to_json(const CantorTree& tree);
/// Throws std::invalid_argument on malformed input.
CantorTree tree_from_json(const Json& json);

Json scheme_report_json(const SchemeReport& report);

} // namespace vwak
