#include "padmm/dyncheck.hpp"

#include <map>
#include <sstream>

namespace padmm {

PreperiodicReport preperiodic_points(const FormalGroupPtr& F, long m, int level, int max_orbit) {
    require(m >= 2, ErrorCode::invalid_argument, "m must be >= 2: every point is preperiodic under [1]");
    require(level >= 0, ErrorCode::invalid_argument, "level must be >= 0");
    const auto table = division_points(F, level);
    PreperiodicReport rep;
    rep.m = m;
    rep.level = level;
    for (const auto& P : table->points) {
        std::map<std::string, int> seen;
        TorsionPoint x = P;
        int step = 0;
        while (!seen.count(x.key())) {
            require(step < max_orbit, ErrorCode::budget, "orbit of " + P.key() + " does not close within the budget");
            seen[x.key()] = step++;
            x = torsion_mul(*table, m, x);
        }
        const int entry = seen[x.key()];
        rep.points.push_back({P, entry, step - entry});
    }
    // The certified set is the whole table; compare against a fresh lookup.
    const auto again = division_points(F, level);
    rep.matches_division_points = again->points.size() == rep.points.size();
    for (std::size_t i = 0; rep.matches_division_points && i < rep.points.size(); ++i)
        rep.matches_division_points = again->points[i] == rep.points[i].point;
    return rep;
}

IntersectionReport unlikely_intersection_scan(const TruncatedSeries& h, const FormalGroupPtr& F,
                                              const FormalGroupPtr& G, int max_level, int threads) {
    require(F->dimension() == 1 && G->dimension() == 1 && h.variables() == 1, ErrorCode::invalid_argument,
            "the scan takes one-dimensional groups and a series in one variable");
    require(max_level >= 0, ErrorCode::invalid_argument, "max level must be >= 0");
    require(h.constant_term().is_zero(), ErrorCode::invalid_argument, "h(0) must be 0");
    require(!h.coeff(Exponent{1}).is_zero(), ErrorCode::invalid_argument, "h'(0) must be nonzero");
    const auto FG = FormalGroupLaw::product({F, G});
    const int D = std::min(h.cap(), FG->cap());
    const StructurePtr& s = h.structure();
    const auto graph = FormalSubscheme::make(
        FG, {h.with_cap(D).remap(2, {0}) - TruncatedSeries::variable(s, 2, D, 1)});
    const ScanReport scan = epsilon_scan(graph, max_level, RationalValuation::infinity(), threads);

    IntersectionReport rep;
    for (const auto& r : scan.rows)
        rep.rows.push_back({r.level, r.torsion_count, r.member_count, r.has_nonmember, r.min_gap});
    for (std::size_t l = 2; l < rep.rows.size(); ++l)
        if (rep.rows[l - 2].hits < rep.rows[l - 1].hits && rep.rows[l - 1].hits < rep.rows[l].hits) rep.growth = true;
    const auto& last = rep.rows.back();
    if (rep.rows.size() >= 2) {
        const auto& prev = rep.rows[rep.rows.size() - 2];
        rep.gap_stable = prev.has_gap == last.has_gap && (!last.has_gap || prev.min_gap == last.min_gap);
    }
    if (rep.growth) {
        rep.homomorphism_checked = true;
        rep.homomorphism = is_homomorphism(h, *F, *G).homomorphism;
    }
    rep.verdict = rep.growth && rep.homomorphism ? "homomorphism-consistent" : "gap";
    return rep;
}

std::string IntersectionReport::to_text() const {
    std::ostringstream os;
    os << "level  pairs  hits  min_gap\n";
    for (const auto& r : rows)
        os << r.level << "  " << r.pairs << "  " << r.hits << "  " << (r.has_gap ? r.min_gap.to_string() : "-") << "\n";
    os << "growth " << (growth ? "yes" : "no");
    if (homomorphism_checked) os << ", homomorphism " << (homomorphism ? "yes" : "no");
    os << ", gap " << (gap_stable ? "stable" : "not stable") << "\nverdict " << verdict << "\n";
    return os.str();
}

}  // namespace padmm
