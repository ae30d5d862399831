#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "padmm/padic.hpp"

namespace padmm {

using Exponent = std::vector<int>;

/// Monomials in n variables of total degree <= D in graded order (by total
/// degree, then lexicographically descending in the exponent of X_1).
class MonomialIndex {
public:
    static std::shared_ptr<const MonomialIndex> get(int n, int D);

    MonomialIndex(int n, int D);

    int variables() const { return n_; }
    int cap() const { return D_; }
    std::size_t size() const { return exps_.size(); }
    /// Number of monomials of total degree <= d.
    std::size_t count_up_to(int d) const;
    const Exponent& exponent(std::size_t i) const { return exps_[i]; }
    int degree(std::size_t i) const { return deg_[i]; }
    /// Index of an exponent vector, or npos when its degree exceeds D.
    std::size_t rank(const int* e) const;
    std::size_t rank(const Exponent& e) const { return rank(e.data()); }
    /// Index of the sum of monomials i and j (must have degree <= D).
    std::size_t sum_index(std::size_t i, std::size_t j) const;
    /// First variable with positive exponent, and index of the monomial with
    /// that exponent lowered by one (for i > 0).
    int pivot(std::size_t i) const { return pivot_[i]; }
    std::size_t parent(std::size_t i) const { return parent_[i]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    int n_, D_;
    std::vector<Exponent> exps_;
    std::vector<int> deg_;
    std::vector<std::size_t> by_degree_;  // first index of each degree, plus end
    std::vector<int> pivot_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> binom_;  // binom_[a][b] = C(a, b)
};

/// Power series in n variables over a structure, truncated at total degree D.
///
/// `exact()` means the series is a polynomial of degree <= D (nothing was
/// truncated). Otherwise `tail_bound()` is a lower bound on the valuations of
/// the omitted coefficients of degree > D.
class TruncatedSeries {
public:
    TruncatedSeries() = default;
    TruncatedSeries(StructurePtr s, int n, int D);

    static TruncatedSeries variable(const StructurePtr& s, int n, int D, int i);
    static TruncatedSeries constant(const StructurePtr& s, int n, int D, const PAdicNumber& c);
    /// Univariate series from integer/rational coefficient list (index = degree).
    static TruncatedSeries univariate(const StructurePtr& s, int D, const std::vector<PAdicNumber>& coeffs);

    const StructurePtr& structure() const { return s_; }
    int variables() const { return n_; }
    int cap() const { return D_; }
    const MonomialIndex& index() const { return *idx_; }
    std::size_t size() const { return c_.size(); }

    const PAdicNumber& coeff(std::size_t i) const { return c_[i]; }
    PAdicNumber coeff(const Exponent& e) const;
    void set(std::size_t i, PAdicNumber v) { c_[i] = std::move(v); }
    void set(const Exponent& e, PAdicNumber v);

    bool exact() const { return exact_; }
    const RationalValuation& tail_bound() const { return tail_; }
    /// Mark that coefficients beyond D are unknown but have valuation >= bound.
    void set_tail(const RationalValuation& bound);
    void set_exact() {
        exact_ = true;
        tail_ = RationalValuation::infinity();
    }

    /// All stored coefficients integral.
    bool integral() const;
    /// Minimum valuation over stored coefficients (infinity for the zero series).
    RationalValuation min_valuation() const;
    /// Minimum of min_valuation() and the tail bound.
    RationalValuation coefficient_floor() const;
    /// Lowest total degree with a nonzero coefficient (D+1 for zero).
    int order() const;
    bool is_zero() const;
    PAdicNumber constant_term() const { return c_[0]; }

    TruncatedSeries operator+(const TruncatedSeries& o) const;
    TruncatedSeries operator-(const TruncatedSeries& o) const;
    TruncatedSeries operator-() const;
    TruncatedSeries operator*(const TruncatedSeries& o) const;
    TruncatedSeries scale(const PAdicNumber& a) const;
    TruncatedSeries pow(int k) const;
    /// Series with the same coefficients in a different number of variables:
    /// variable i of this series becomes variable map[i] of the result.
    TruncatedSeries remap(int n, const std::vector<int>& map) const;
    TruncatedSeries with_cap(int D) const;
    TruncatedSeries with_precision(int digits) const;
    TruncatedSeries lift_to(const StructurePtr& s) const;
    /// Push every coefficient through a field embedding into `s`.
    TruncatedSeries map_coefficients(const StructurePtr& s,
                                     const std::function<PAdicNumber(const PAdicNumber&)>& phi) const;

    TruncatedSeries derivative(int var) const;
    /// Formal antiderivative in a single-variable series.
    TruncatedSeries integrate() const;

    /// First exponent (in graded order) where the series differ, if any.
    std::optional<Exponent> first_difference(const TruncatedSeries& o) const;
    bool equals(const TruncatedSeries& o) const { return !first_difference(o).has_value(); }

    std::string to_string() const;

private:
    friend TruncatedSeries compose(const TruncatedSeries&, const std::vector<TruncatedSeries>&);
    void check_compatible(const TruncatedSeries& o) const;
    TruncatedSeries with_cap_unchecked(int D) const;

    StructurePtr s_;
    int n_ = 0, D_ = 0;
    std::shared_ptr<const MonomialIndex> idx_;
    std::vector<PAdicNumber> c_;
    bool exact_ = true;
    RationalValuation tail_ = RationalValuation::infinity();
};

/// f(g_1, ..., g_m); each g_k must have zero constant term.
TruncatedSeries compose(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g);
/// f(g_1, ..., g_m) where the g_k may have constant terms of positive
/// valuation (or any constant when f is a polynomial). Coefficient precision is
/// capped by the contribution of the truncated tail of f.
TruncatedSeries compose_shifted(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g);

/// 1/u for a series with unit constant term.
TruncatedSeries multiplicative_inverse(const TruncatedSeries& u);

/// Compositional inverse of a single-variable series with unit linear term.
TruncatedSeries reversion(const TruncatedSeries& f);

struct Evaluation {
    PAdicNumber value;
    RationalValuation tail_bound;  // lower bound on the valuation of the omitted terms
    /// min(v(value), tail_bound): what can be certified about the true value.
    RationalValuation certified_valuation() const;
};

/// Evaluate at a point whose coordinates live in the series structure or an
/// extension of it.
Evaluation evaluate(const TruncatedSeries& f, const std::vector<PAdicNumber>& point);

struct WeierstrassData {
    TruncatedSeries unit;
    TruncatedSeries dpoly;  // monic of degree nu in the distinguished variable
    int degree = 0;         // nu
    int variable = 0;
    /// Coefficients of dpoly as a polynomial in the distinguished variable
    /// (series in the same variables, not involving the distinguished one).
    std::vector<TruncatedSeries> coefficients;
};

/// f = unit * dpoly through degree D.
WeierstrassData weierstrass_prepare(const TruncatedSeries& f, int var);

/// Text form: a header line followed by one line per term "J1,...,Jn : digits".
std::string series_to_text(const TruncatedSeries& f);
TruncatedSeries series_from_text(const std::string& text);
/// Parse term lines only, into a series over a given structure.
TruncatedSeries series_from_terms(const StructurePtr& s, int n, int D, const std::string& text);

/// Coefficient text: base-p digits, least significant first, '.' after the
/// fractional digits, optional "@prec"; or "q:<num>/<den>" for a rational.
std::string coefficient_to_text(const PAdicNumber& x);
PAdicNumber coefficient_from_text(const StructurePtr& s, const std::string& text);

}  // namespace padmm
