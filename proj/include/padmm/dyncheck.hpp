#pragma once

#include <string>
#include <vector>

#include "padmm/scheme.hpp"

namespace padmm {

struct PreperiodicPoint {
    TorsionPoint point;
    int preperiod = 0;  // steps before the orbit enters its cycle
    int period = 0;
};

struct PreperiodicReport {
    long m = 0;
    int level = 0;
    std::vector<PreperiodicPoint> points;  // table order
    bool matches_division_points = false;
};

/// Torsion through `level`, each certified preperiodic under [m] by an explicit
/// orbit that closes within max_orbit steps.
PreperiodicReport preperiodic_points(const FormalGroupPtr& F, long m, int level, int max_orbit = 2000);

struct IntersectionRow {
    int level = 0;  // pairs (zeta, xi) with both levels <= level
    long pairs = 0;
    long hits = 0;
    bool has_gap = false;
    RationalValuation min_gap;  // closest approach among non-hits
};

struct IntersectionReport {
    std::vector<IntersectionRow> rows;
    bool growth = false;          // hits strictly increase over three consecutive levels
    bool homomorphism_checked = false;
    bool homomorphism = false;
    bool gap_stable = false;      // same min gap on the last two levels
    std::string verdict;          // "homomorphism-consistent" or "gap"
    std::string to_text() const;
};

/// Brute force over F[p^l] x G[p^l], l <= max_level: distance of every pair to
/// the graph h(Y_1) - Y_2.
IntersectionReport unlikely_intersection_scan(const TruncatedSeries& h, const FormalGroupPtr& F,
                                              const FormalGroupPtr& G, int max_level, int threads = 1);

}  // namespace padmm
