#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "padmm/error.hpp"
#include "padmm/valuation.hpp"

namespace padmm {

using Int = mpz_class;

struct TowerStep {
    enum class Kind { unramified, eisenstein };
    Kind kind;
    std::vector<Int> minpoly;  // integer coefficients, constant term first, monic
};

class Structure;
using StructurePtr = std::shared_ptr<const Structure>;

/// Residue field F_q = F_p[t]/(u(t)) of a structure. Elements are coefficient
/// vectors of length f with entries in [0, p).
class ResidueField {
public:
    using Elem = std::vector<long>;

    ResidueField(long p, std::vector<long> modulus);

    long characteristic() const { return p_; }
    int degree() const { return f_; }
    long cardinality() const;

    Elem zero() const { return Elem(f_, 0); }
    Elem one() const;
    Elem add(const Elem& a, const Elem& b) const;
    Elem sub(const Elem& a, const Elem& b) const;
    Elem mul(const Elem& a, const Elem& b) const;
    Elem pow(Elem a, std::uint64_t k) const;
    Elem inv(const Elem& a) const;
    bool is_zero(const Elem& a) const;
    /// Element with index in [0, q): base-p digits of the index.
    Elem element(long index) const;

private:
    long p_;
    int f_;
    std::vector<long> modulus_;  // monic, length f+1
};

/// A finite extension of Q_p at fixed working precision N, represented as an
/// explicit tower Q_p -> (unramified step of degree f) -> (Eisenstein step of
/// degree e). Elements are sums c_{ij} pi^i t^j (i < e, j < f) divided by a
/// power of p.
class Structure {
public:
    static constexpr int kGuard = 8;

    /// Q_p at working precision N, carrying `guard` extra digits internally.
    static StructurePtr rationals(long p, int precision, int guard = kGuard);

    long prime() const { return p_; }
    int e() const { return e_; }
    int f() const { return f_; }
    int degree() const { return e_ * f_; }
    int precision() const { return N_; }

    /// Default absolute precision of fresh elements, in units of v(pi) = 1/e.
    int working_digits() const { return e_ * N_; }
    /// Upper bound on tracked precision (working precision plus guard digits).
    int cap_digits() const { return e_ * (N_ + guard_); }
    int guard() const { return guard_; }

    const std::vector<TowerStep>& steps() const { return steps_; }
    const std::vector<Int>& unramified_poly() const { return unram_; }
    const std::vector<Int>& eisenstein_poly() const { return eis_; }
    const ResidueField& residue_field() const { return residue_; }
    long residue_cardinality() const { return residue_.cardinality(); }

    /// Same p, same defining polynomials (precision may differ).
    bool same_field(const Structure& o) const;
    bool is_subfield_of(const Structure& o) const;
    std::string describe() const;

    StructurePtr with_precision(int precision) const;

    const Int& p_power(int k) const;

    // Raw data for the uniformizer inverse pi^{-1} (coefficients over p^1).
    const std::vector<Int>& pi_inverse_coefficients() const { return pi_inv_; }

    Structure(long p, int N, int guard, std::vector<TowerStep> steps, std::vector<Int> unram, std::vector<Int> eis);

private:
    void init_constants();

    long p_;
    int e_, f_, N_, guard_;
    std::vector<TowerStep> steps_;
    std::vector<Int> unram_;
    std::vector<Int> eis_;
    ResidueField residue_;
    std::vector<Int> p_powers_;
    std::vector<Int> pi_inv_;
};

/// Adjoin a root of `minpoly` to `base`. Unramified steps need an
/// irreducible-mod-p polynomial over a base with f = 1; Eisenstein steps need
/// a base with e = 1.
StructurePtr extend_field(const StructurePtr& base, std::vector<Int> minpoly, TowerStep::Kind kind);

bool is_irreducible_mod_p(const std::vector<Int>& poly, long p);
/// First monic irreducible polynomial of the given degree mod p, with
/// coefficients in [0, p) ordered lexicographically from the constant term.
std::vector<Int> smallest_irreducible_mod_p(long p, int degree);

class PAdicNumber {
public:
    PAdicNumber() = default;

    static PAdicNumber zero(const StructurePtr& s);
    static PAdicNumber one(const StructurePtr& s);
    static PAdicNumber from_int(const StructurePtr& s, const Int& v);
    static PAdicNumber from_rational(const StructurePtr& s, const Int& num, const Int& den);
    /// The uniformizer pi (p itself when e = 1).
    static PAdicNumber uniformizer(const StructurePtr& s);
    /// The unramified generator t (1 when f = 1).
    static PAdicNumber unramified_generator(const StructurePtr& s);
    /// Raw constructor: value = (sum coeffs[i*f+j] pi^i t^j) / p^denominator_exponent,
    /// known modulo pi^precision_digits.
    static PAdicNumber from_coefficients(const StructurePtr& s, std::vector<Int> coeffs, int denominator_exponent,
                                         int precision_digits);
    /// Lift of a residue-field element using representatives in [0, p).
    static PAdicNumber lift_residue(const StructurePtr& s, const ResidueField::Elem& r);

    bool valid() const { return static_cast<bool>(s_); }
    const StructurePtr& structure() const { return s_; }
    const std::vector<Int>& coefficients() const { return c_; }
    int denominator_exponent() const { return k_; }

    /// Absolute precision in units of 1/e.
    int precision_digits() const { return prec_; }
    RationalValuation precision() const;
    /// Valuation in units of 1/e; precision_digits() when zero to precision.
    std::int64_t valuation_digits() const;
    RationalValuation valuation() const;
    bool is_zero() const;
    bool is_integral() const { return valuation_digits() >= 0; }
    bool is_unit() const { return valuation_digits() == 0; }

    /// Residue class of an integral element.
    ResidueField::Elem residue() const;
    /// Base-field value as a rational num/p^k, valid when degree() == 1 or
    /// the element lies in Q_p.
    bool lies_in_base() const;
    Int base_numerator() const;

    PAdicNumber with_precision(int digits) const;
    PAdicNumber lift_to(const StructurePtr& target) const;  // same field, higher precision allowed
    PAdicNumber embed(const StructurePtr& target) const;    // into an extension

    PAdicNumber operator+(const PAdicNumber& o) const;
    PAdicNumber operator-(const PAdicNumber& o) const;
    PAdicNumber operator*(const PAdicNumber& o) const;
    PAdicNumber operator/(const PAdicNumber& o) const;
    PAdicNumber operator-() const;
    PAdicNumber& operator+=(const PAdicNumber& o) { return *this = *this + o; }
    PAdicNumber& operator-=(const PAdicNumber& o) { return *this = *this - o; }
    PAdicNumber& operator*=(const PAdicNumber& o) { return *this = *this * o; }

    PAdicNumber mul_int(const Int& m) const;
    PAdicNumber pow(std::int64_t k) const;
    PAdicNumber inverse() const;
    /// Multiply by pi^k (k may be negative).
    PAdicNumber shift_pi(std::int64_t k) const;

    /// Equality modulo the coarser of the two precision ideals.
    bool equals(const PAdicNumber& o) const;
    bool operator==(const PAdicNumber& o) const { return equals(o); }

    /// Canonical comparison key (for deterministic ordering).
    std::string key() const;
    std::string to_string() const;

private:
    void canonicalize();

    StructurePtr s_;
    std::vector<Int> c_;
    int k_ = 0;
    int prec_ = 0;
};

enum class ArithOp { add, sub, mul, div };
PAdicNumber arith(ArithOp op, const PAdicNumber& x, const PAdicNumber& y);

PAdicNumber teichmuller_lift(const StructurePtr& s, const ResidueField::Elem& residue);

using PolyK = std::vector<PAdicNumber>;  // constant term first

PAdicNumber poly_eval(const PolyK& poly, const PAdicNumber& x);
PolyK poly_derivative(const PolyK& poly);
PolyK poly_mul(const PolyK& a, const PolyK& b);
PolyK poly_from_ints(const StructurePtr& s, const std::vector<Int>& coeffs);

struct NewtonSegment {
    RationalValuation root_valuation;  // negated hull slope
    int length;
    bool operator==(const NewtonSegment&) const = default;
};

/// Lower convex hull of {(i, v(a_i))}, reported as root valuations with
/// multiplicities, in increasing order of root valuation.
std::vector<NewtonSegment> newton_polygon(const PolyK& poly);

/// Newton iteration from `seed`; requires v(P(seed)) > 2 v(P'(seed)).
PAdicNumber hensel_root(const PolyK& poly, const PAdicNumber& seed);

/// All roots of `poly` in the valuation ring of its structure, found by
/// residue enumeration and Hensel refinement. Roots are sorted by key().
std::vector<PAdicNumber> integral_roots(const PolyK& poly);

}  // namespace padmm
