#pragma once

#include <optional>
#include <vector>

#include "padmm/lattice.hpp"
#include "padmm/scheme.hpp"

namespace padmm {

// Points of the multiplicative group are carried in the unit chart (the value
// zeta); the formal chart is zeta - 1.

struct RootOfUnity {
    PAdicNumber value;
    long order = 1;
};

struct RootTable {
    StructurePtr field;
    std::vector<RootOfUnity> roots;               // sorted by (order, key)
    std::vector<std::vector<std::size_t>> tuples;  // all n-tuples, as indices into roots
    std::vector<PAdicNumber> tuple(std::size_t i) const;
};

constexpr long kRootBudget = 2000;

/// All roots of unity whose exact order lies in `orders`, in one field: the
/// prime-to-p part as Teichmüller lifts in an unramified extension, the
/// p-part from the cyclotomic tower over it.
RootTable roots_of_unity(const std::vector<long>& orders, int n, const StructurePtr& base);

/// Multiplicative order of p modulo m (m prime to p).
long residue_order(long p, long m);

struct StabilityResult {
    bool stable = true;
    std::optional<std::vector<PAdicNumber>> counterexample;  // a sample point whose p-th power leaves X
};

/// Whether the coordinatewise p-th power of every sample member of X (unit
/// chart generators) is again a member.
StabilityResult p_power_stability(const FormalSubscheme& X, const std::vector<std::vector<PAdicNumber>>& sample);

struct RelationLattice {
    IntMat basis;  // Hermite basis of {m : sum m_i log(1 + x_i) = 0} for all points
    int rank() const { return static_cast<int>(basis.size()); }
};

/// log(1 + x) for v(x) > 0, summed until the terms pass the precision of x.
PAdicNumber log1p(const PAdicNumber& x);

/// Integer relations among coordinatewise logarithms of points given in the
/// formal chart (coordinate valuations > 1/(p-1)). None when no relation
/// survives at precision.
std::optional<RelationLattice> subtorus_from_log(const std::vector<std::vector<PAdicNumber>>& points);

/// A stabilizer family: the tuple (w^{a_1}, ..., w^{a_n}) for w a root of unity
/// of the given order, or for every root of unity when order == 0.
struct StabilizerFamily {
    std::vector<long> exponents;
    long order = 0;
};

struct LambdaLattice {
    int n = 0;
    IntMat basis;                   // Hermite basis of the kernel of the characters
    bool finite_stabilizer = false;  // rank n
    IntVec normal;                  // c with c . lambda = 0 on the basis (empty when finite)
};

LambdaLattice lambda_lattice(int n, const std::vector<StabilizerFamily>& families);

struct SupportCheck {
    Exponent monomial;
    IntVec shifted;  // (i_1, ..., i_{n-1}, i_n - nu)
    bool in_lambda = false;
};

struct EtaProjection {
    PAdicNumber eta;
    std::vector<PAdicNumber> projected;  // (zeta_i eta^{c_i}) for i < n
    TruncatedSeries rho_bar;             // rho(X_1, ..., X_{n-1}, 1)
    std::vector<SupportCheck> support;
    bool support_ok = false;
    RationalValuation value_valuation;   // v(rho_bar(projected)), infinity to the floor
    bool vanishes = false;
};

/// rho monic of degree nu in X_n (unit chart), zeta on its zero set.
EtaProjection eta_projection(const TruncatedSeries& rho, const LambdaLattice& lambda,
                             const std::vector<PAdicNumber>& zeta);

}  // namespace padmm
