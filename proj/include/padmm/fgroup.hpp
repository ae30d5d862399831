#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "padmm/series.hpp"

namespace padmm {

enum class GroupKind { additive, multiplicative, lubin_tate, from_log, product, custom };

const char* group_kind_name(GroupKind k);

class FormalGroupLaw;
using FormalGroupPtr = std::shared_ptr<const FormalGroupLaw>;

struct HeightResult {
    bool finite = false;
    int height = 0;       // valid when finite
    int lower_bound = 0;  // when not finite: height > lower_bound at this cap
    std::string to_string() const;
};

struct AxiomReport {
    bool identity = true, commutativity = true, associativity = true, integrality = true;
    // First failing coefficient per axiom (component index, exponent).
    std::optional<std::pair<int, Exponent>> identity_failure, commutativity_failure, associativity_failure,
        integrality_failure;
    bool all() const { return identity && commutativity && associativity && integrality; }
};

struct HomomorphismReport {
    bool homomorphism = false;
    std::optional<Exponent> failure;  // first coefficient of h(F(X,Y)) - G(h(X),h(Y))
    bool commutes_with_two = false;
    std::optional<Exponent> commutation_failure;  // h o [2]_F vs [2]_G o h
};

/// A commutative formal group law of dimension n: either one-dimensional, or a
/// product of one-dimensional laws acting componentwise. Component i of the law
/// is a series in 2n variables (X_1..X_n, Y_1..Y_n).
class FormalGroupLaw {
public:
    static FormalGroupPtr additive(const StructurePtr& s, int D);
    static FormalGroupPtr multiplicative(const StructurePtr& s, int D);
    /// Lubin-Tate law attached to f with f = pi X + ... and f = X^q mod pi.
    static FormalGroupPtr lubin_tate(const StructurePtr& s, int D, const TruncatedSeries& f);
    /// F = exp_l(l(X) + l(Y)) for a logarithm l with l(0) = 0, l'(0) = 1.
    static FormalGroupPtr from_log(const StructurePtr& s, int D, const TruncatedSeries& ell);
    static FormalGroupPtr product(const std::vector<FormalGroupPtr>& factors);
    /// Wrap an arbitrary one-dimensional series in two variables (not certified).
    static FormalGroupPtr custom(const TruncatedSeries& law);

    int dimension() const { return n_; }
    const StructurePtr& structure() const { return s_; }
    int cap() const { return D_; }
    GroupKind kind() const { return kind_; }
    /// f for Lubin-Tate laws, the logarithm for from_log laws.
    const std::optional<TruncatedSeries>& parameter() const { return param_; }
    const std::vector<TruncatedSeries>& law() const { return law_; }
    /// One-dimensional factors (the law itself when n = 1).
    const std::vector<FormalGroupPtr>& factors() const { return factors_; }
    std::string describe() const;

    /// Exact polynomial with kernel F[p] (one-dimensional laws only), when known:
    /// (1+X)^p - 1 for the multiplicative law, f for Lubin-Tate laws.
    const std::optional<std::vector<Int>>& division_polynomial() const { return divpoly_; }

    // Derived maps for one-dimensional laws (memoized).
    TruncatedSeries mult_by(std::int64_t m) const;
    TruncatedSeries inverse_series() const;
    TruncatedSeries log() const;
    TruncatedSeries exp() const;
    HeightResult height() const;

    /// [m] on each factor, as series in one variable.
    std::vector<TruncatedSeries> mult_by_components(std::int64_t m) const;

    // Point arithmetic (points are coordinate vectors of length n with
    // positive valuations). Tail bounds of non-polynomial laws are returned.
    struct PointValue {
        std::vector<PAdicNumber> coords;
        RationalValuation tail_bound = RationalValuation::infinity();
    };
    PointValue add(const std::vector<PAdicNumber>& P, const std::vector<PAdicNumber>& Q) const;
    PointValue negate(const std::vector<PAdicNumber>& P) const;
    PointValue subtract(const std::vector<PAdicNumber>& P, const std::vector<PAdicNumber>& Q) const;
    PointValue multiply(std::int64_t m, const std::vector<PAdicNumber>& P) const;

    FormalGroupLaw(GroupKind kind, StructurePtr s, int n, int D, std::vector<TruncatedSeries> law);

private:
    GroupKind kind_;
    StructurePtr s_;
    int n_, D_;
    std::vector<TruncatedSeries> law_;
    std::optional<TruncatedSeries> param_;
    std::vector<FormalGroupPtr> factors_;
    std::optional<std::vector<Int>> divpoly_;
    std::weak_ptr<const FormalGroupLaw> self_;

    mutable std::mutex mu_;
    mutable std::map<std::int64_t, TruncatedSeries> mult_cache_;
    mutable std::optional<TruncatedSeries> inverse_cache_, log_cache_, exp_cache_;

    static FormalGroupPtr finish(std::shared_ptr<FormalGroupLaw> g);
};

AxiomReport check_axioms(const FormalGroupLaw& F);
HomomorphismReport is_homomorphism(const TruncatedSeries& h, const FormalGroupLaw& F, const FormalGroupLaw& G);

/// One-dimensional series with zero constant term, as a law-variable series.
TruncatedSeries law_in_variables(const TruncatedSeries& law, int n, int x, int y);

}  // namespace padmm
