#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "padmm/fgroup.hpp"

namespace padmm {

/// A p-power torsion point of a formal group (or of a product of laws), with
/// coordinates in an explicitly constructed field.
struct TorsionPoint {
    std::vector<PAdicNumber> coords;
    int level = 0;  // exact level r: killed by [p^r] and not by [p^{r-1}]

    const StructurePtr& field() const { return coords.at(0).structure(); }
    bool is_zero() const;
    std::string key() const;
    bool operator==(const TorsionPoint& o) const;
};

/// Galois element sigma_u composed with a power of Frobenius.
struct GaloisElement {
    Int u = 1;          // acts as [u] on torsion
    int frobenius = 0;  // power of Frobenius on the unramified part
    GaloisElement operator*(const GaloisElement& o) const { return {u * o.u, frobenius + o.frobenius}; }
};

/// The tower of fields K_1 ⊂ K_2 ⊂ ... generated by torsion of a
/// one-dimensional law with an exact division polynomial. Each K_r is an
/// absolute Eisenstein extension of the base, with explicit embeddings
/// K_{r-1} -> K_r.
class TorsionTower {
public:
    TorsionTower(StructurePtr base, std::vector<Int> division_polynomial);

    const StructurePtr& base() const { return base_; }
    /// Field K_r (K_0 is the base).
    StructurePtr field(int r) const;
    /// Map an element of K_a into K_b (a <= b).
    PAdicNumber map(const PAdicNumber& x, int from_level, int to_level) const;
    /// Level of the tower whose field is `s` (by identity), or -1.
    int level_of(const StructurePtr& s) const;
    const std::vector<Int>& division_polynomial() const { return g_; }

private:
    void ensure(int r) const;

    StructurePtr base_;
    std::vector<Int> g_;
    mutable std::mutex mu_;
    mutable std::vector<StructurePtr> fields_;  // fields_[r]
    mutable std::vector<PAdicNumber> gamma_;    // gamma_[r] = image of the K_{r-1} generator in K_r
    mutable std::vector<std::vector<Int>> iterates_;  // g^{o r}
};
using TorsionTowerPtr = std::shared_ptr<const TorsionTower>;

/// All torsion of a group through a given level, with coordinates in one field.
struct TorsionTable {
    FormalGroupPtr group;
    int level = 0;
    StructurePtr field;
    TorsionTowerPtr tower;  // null when all torsion is trivial
    int field_level = 0;    // field == tower->field(field_level)
    std::vector<TorsionPoint> points;  // sorted by (level, key)
    // Per coordinate: the largest valuation of a nonzero torsion coordinate.
    // Distinct points differ by at most this much in each coordinate.
    std::vector<RationalValuation> separation;
    // Points keyed by their coordinates truncated just past the separation.
    std::unordered_map<std::string, std::size_t> lookup;
    std::vector<int> key_digits;

    /// Index of the stored point equal to `approx` within the certified bound.
    std::size_t locate(const std::vector<PAdicNumber>& approx, const RationalValuation& tail_bound) const;
    std::size_t index_of(const TorsionPoint& P) const;

    std::vector<TorsionPoint> exact_level(int r) const;
    /// The stored point equal to `approx` within the certified bound, if unique.
    const TorsionPoint& snap(const std::vector<PAdicNumber>& approx, const RationalValuation& tail_bound) const;
    const TorsionPoint& find(const TorsionPoint& P) const;
    /// Re-express a point of this table in a table at a higher level.
    TorsionPoint lift(const TorsionPoint& P, const TorsionTable& higher) const;
};

/// Maximum number of torsion points computed per factor.
constexpr long kTorsionBudget = 2000;

/// F[p^r] for F one-dimensional or a product of one-dimensional laws.
/// Results are cached per (group, level).
std::shared_ptr<const TorsionTable> division_points(const FormalGroupPtr& F, int r);

/// sigma_g(P): [u](P), with Frobenius acting on unramified coordinates.
TorsionPoint galois_orbit(const TorsionTable& table, const TorsionPoint& P, const GaloisElement& g);

/// P -_F Q and P +_F Q within a table (results snapped to table points).
TorsionPoint torsion_add(const TorsionTable& table, const TorsionPoint& P, const TorsionPoint& Q);
TorsionPoint torsion_sub(const TorsionTable& table, const TorsionPoint& P, const TorsionPoint& Q);
TorsionPoint torsion_mul(const TorsionTable& table, std::int64_t m, const TorsionPoint& P);

struct BoxallStep {
    int index = 0;    // i
    Int u;            // s_i = sigma_u
    TorsionPoint Q;   // s_i(P_{i+1}) -_F P_{i+1}
};

struct BoxallResult {
    GaloisElement g;
    TorsionPoint witness;  // g(P) -_F P, of exact level r
    std::vector<BoxallStep> chain;
    // The base step of the chain had no witness and g was found by exhaustive
    // search over Gal(K(F[p^r])) instead.
    bool by_search = false;
};

/// Descent for a torsion point P of exact level n > r on a one-dimensional law:
/// returns g in Gal(K(F[p^r])) with g(P) -_F P of exact level r. Follows the
/// induction s_i = s_1^{p^{i-1}}, P_i = [p^{n-r-i+1}]P and asserts that the
/// differences Q_i agree along the chain.
BoxallResult boxall_descent(const FormalGroupPtr& F, const TorsionPoint& P, int r);

/// Field automorphism: Frobenius^k on the unramified generator.
PAdicNumber frobenius(const PAdicNumber& x, int k);

}  // namespace padmm
