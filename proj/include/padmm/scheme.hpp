#pragma once

#include <string>
#include <vector>

#include "padmm/torsion.hpp"

namespace padmm {

/// Subscheme of a formal group cut out by finitely many series in the
/// ambient coordinates.
struct FormalSubscheme {
    FormalGroupPtr ambient;
    std::vector<TruncatedSeries> generators;

    static FormalSubscheme make(FormalGroupPtr ambient, std::vector<TruncatedSeries> generators);
    bool through_identity() const;
};

/// "On X" means every generator valuation reaches N - margin.
constexpr int kSafetyMargin = 4;
RationalValuation membership_floor(const StructurePtr& s, int margin = kSafetyMargin);

/// min_i v(phi_i(P)) with tail bounds folded in; infinity when P lies on X to
/// the working floor.
RationalValuation distance(const FormalSubscheme& X, const std::vector<PAdicNumber>& P, int margin = kSafetyMargin);

/// Generators phi_i(F(X, Q)): P lies on the result iff P +_F Q lies on X.
FormalSubscheme translate(const FormalSubscheme& X, const std::vector<PAdicNumber>& Q);

/// Express the generators over the field of a torsion table (coefficients
/// pushed up the tower when they live in a lower torsion field).
FormalSubscheme over_table(const FormalSubscheme& X, const TorsionTable& table);

/// Torsion points zeta of level <= r with xi +_F zeta on X for every torsion
/// member xi of X of level <= r.
std::vector<TorsionPoint> stabilizer_probe(const FormalSubscheme& X, int r, int threads = 1);

struct ScanRow {
    int level = 0;              // covers all of F[p^level]
    long torsion_count = 0;
    long member_count = 0;
    long near_count = 0;        // non-members with distance > threshold
    bool has_nonmember = false;
    RationalValuation min_gap;  // closest approach of a non-member (largest valuation)
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::vector<TorsionPoint> members;  // through the top level
    RationalValuation threshold;
    std::string to_text() const;
};

ScanReport epsilon_scan(const FormalSubscheme& X, int max_level, const RationalValuation& threshold, int threads = 1);

struct CoveringPiece {
    TorsionPoint Q;
    FormalSubscheme intersection;    // generators of X followed by those of T_Q X
    std::vector<long> member_counts;  // per level 0..scan_level (cumulative)
};

struct CoveringReport {
    int r = 0;
    int scan_level = 0;
    std::vector<CoveringPiece> pieces;
    std::vector<long> members_per_level;   // members of X, cumulative
    std::vector<TorsionPoint> uncovered;   // members of X outside F[p^{r-1}] and every piece
    bool verified() const { return uncovered.empty(); }
};

/// X(eps) ⊆ F[p^{r-1}] ∪ ⋃_Q (X ∩ T_Q X) over Q in F[p^r] \ F[p^{r-1}], checked on
/// every torsion member of X up to scan_level.
CoveringReport covering_step(const FormalSubscheme& X, int r, int scan_level, int threads = 1);

}  // namespace padmm
