#include "padmm/padic.hpp"

#include <algorithm>
#include <sstream>

namespace padmm {

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

int vp(const Int& x, long p) {
    if (x == 0) return 1 << 29;
    Int tmp;
    return static_cast<int>(mpz_remove(tmp.get_mpz_t(), x.get_mpz_t(), Int(p).get_mpz_t()));
}

long mod_long(const Int& x, long p) {
    Int r;
    mpz_fdiv_r_ui(r.get_mpz_t(), x.get_mpz_t(), static_cast<unsigned long>(p));
    return r.get_si();
}

bool compatible(const Structure& a, const Structure& b) {
    return &a == &b || (a.same_field(b) && a.precision() == b.precision() && a.guard() == b.guard());
}

void check_same(const PAdicNumber& x, const PAdicNumber& y) {
    require(x.valid() && y.valid(), ErrorCode::invalid_argument, "uninitialized p-adic number");
    require(compatible(*x.structure(), *y.structure()), ErrorCode::invalid_argument,
            "structure mismatch: " + x.structure()->describe() + " vs " + y.structure()->describe());
}

// ---- polynomials over F_p (constant term first) ----

using PolyP = std::vector<long>;

void trim(PolyP& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

PolyP polyp_mod(PolyP a, const PolyP& m, long p) {
    trim(a);
    const long lead_inv = [&] {
        long x = m.back() % p, r = 1, k = p - 2;
        while (k > 0) {
            if (k & 1) r = r * x % p;
            x = x * x % p;
            k >>= 1;
        }
        return r;
    }();
    while (a.size() >= m.size()) {
        const long c = a.back() * lead_inv % p;
        const std::size_t shift = a.size() - m.size();
        for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = ((a[shift + i] - c * m[i]) % p + p) % p;
        trim(a);
    }
    return a;
}

PolyP polyp_mulmod(const PolyP& a, const PolyP& b, const PolyP& m, long p) {
    if (a.empty() || b.empty()) return {};
    PolyP r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    return polyp_mod(std::move(r), m, p);
}

PolyP polyp_gcd(PolyP a, PolyP b, long p) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        PolyP r = polyp_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

}  // namespace

// ---------------------------------------------------------------------------
// ResidueField

ResidueField::ResidueField(long p, std::vector<long> modulus) : p_(p), f_(static_cast<int>(modulus.size()) - 1),
                                                                modulus_(std::move(modulus)) {}

long ResidueField::cardinality() const {
    long q = 1;
    for (int i = 0; i < f_; ++i) q *= p_;
    return q;
}

ResidueField::Elem ResidueField::one() const {
    Elem r(f_, 0);
    r[0] = 1;
    return r;
}

ResidueField::Elem ResidueField::add(const Elem& a, const Elem& b) const {
    Elem r(f_);
    for (int i = 0; i < f_; ++i) r[i] = (a[i] + b[i]) % p_;
    return r;
}

ResidueField::Elem ResidueField::sub(const Elem& a, const Elem& b) const {
    Elem r(f_);
    for (int i = 0; i < f_; ++i) r[i] = ((a[i] - b[i]) % p_ + p_) % p_;
    return r;
}

ResidueField::Elem ResidueField::mul(const Elem& a, const Elem& b) const {
    std::vector<long> r(2 * f_ - 1, 0);
    for (int i = 0; i < f_; ++i)
        for (int j = 0; j < f_; ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p_;
    for (int j = 2 * f_ - 2; j >= f_; --j) {
        const long c = r[j];
        if (c == 0) continue;
        for (int l = 0; l < f_; ++l) r[j - f_ + l] = ((r[j - f_ + l] - c * modulus_[l]) % p_ + p_) % p_;
        r[j] = 0;
    }
    r.resize(f_);
    return r;
}

ResidueField::Elem ResidueField::pow(Elem a, std::uint64_t k) const {
    Elem r = one();
    while (k > 0) {
        if (k & 1) r = mul(r, a);
        a = mul(a, a);
        k >>= 1;
    }
    return r;
}

ResidueField::Elem ResidueField::inv(const Elem& a) const {
    require(!is_zero(a), ErrorCode::domain, "inverting zero in the residue field");
    return pow(a, static_cast<std::uint64_t>(cardinality() - 2));
}

bool ResidueField::is_zero(const Elem& a) const {
    return std::all_of(a.begin(), a.end(), [](long x) { return x == 0; });
}

ResidueField::Elem ResidueField::element(long index) const {
    Elem r(f_);
    for (int i = 0; i < f_; ++i) {
        r[i] = index % p_;
        index /= p_;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Structure

namespace {

std::vector<long> reduce_modulus(const std::vector<Int>& poly, long p) {
    std::vector<long> r;
    r.reserve(poly.size());
    for (const auto& c : poly) r.push_back(mod_long(c, p));
    return r;
}

StructurePtr make_structure(long p, int N, int guard, std::vector<TowerStep> steps, std::vector<Int> unram,
                            std::vector<Int> eis) {
    auto s = std::make_shared<Structure>(p, N, guard, std::move(steps), std::move(unram), std::move(eis));
    return s;
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

}  // namespace

Structure::Structure(long p, int N, int guard, std::vector<TowerStep> steps, std::vector<Int> unram,
                     std::vector<Int> eis)
    : p_(p), e_(static_cast<int>(eis.size()) - 1), f_(static_cast<int>(unram.size()) - 1), N_(N), guard_(guard),
      steps_(std::move(steps)), unram_(std::move(unram)), eis_(std::move(eis)),
      residue_(p, reduce_modulus(unram_, p)) {
    require(N >= 1, ErrorCode::invalid_argument, "working precision must be at least 1");
    require(guard >= 0, ErrorCode::invalid_argument, "negative guard digits");
    const int needed = N_ + guard_ + 256;
    p_powers_.resize(needed + 1);
    p_powers_[0] = 1;
    for (int i = 1; i <= needed; ++i) p_powers_[i] = p_powers_[i - 1] * p_;
    init_constants();
}

void Structure::init_constants() {
    // pi^e = p * eps with eps = -(sum_{l<e} a_l pi^l) / p a unit.
    const int E = e_, F = f_;
    std::vector<Int> eps(E * F, 0);
    for (int l = 0; l < E; ++l) eps[l * F] = -eis_[l] / p_;
    StructurePtr self(this, [](const Structure*) {});
    const PAdicNumber eps_n = PAdicNumber::from_coefficients(self, eps, 0, cap_digits() + E);
    PAdicNumber inv = eps_n.inverse();
    // pi^{-1} = pi^{e-1} eps^{-1} / p
    if (E > 1) {
        std::vector<Int> pc(E * F, 0);
        pc[(E - 1) * F] = 1;
        inv = inv * PAdicNumber::from_coefficients(self, pc, 0, cap_digits() + E);
    }
    // Stored as raw data over p^1.
    std::vector<Int> c = inv.coefficients();
    const int k = inv.denominator_exponent();
    require(k == 0, ErrorCode::internal_assertion, "unit inverse carries a denominator");
    pi_inv_ = std::move(c);
}

StructurePtr Structure::rationals(long p, int precision, int guard) {
    require(is_prime(p), ErrorCode::invalid_argument, std::to_string(p) + " is not prime");
    return make_structure(p, precision, guard, {}, {Int(0), Int(1)}, {Int(-p), Int(1)});
}

bool Structure::same_field(const Structure& o) const {
    return p_ == o.p_ && unram_ == o.unram_ && eis_ == o.eis_;
}

bool Structure::is_subfield_of(const Structure& o) const {
    if (p_ != o.p_) return false;
    const bool unram_ok = f_ == 1 || unram_ == o.unram_;
    const bool eis_ok = e_ == 1 || eis_ == o.eis_;
    return unram_ok && eis_ok;
}

std::string Structure::describe() const {
    std::ostringstream os;
    os << "Q_" << p_;
    for (const auto& st : steps_) {
        os << (st.kind == TowerStep::Kind::unramified ? " -> unr[" : " -> eis[");
        for (std::size_t i = 0; i < st.minpoly.size(); ++i) os << (i ? "," : "") << st.minpoly[i].get_str();
        os << "]";
    }
    os << " (e=" << e_ << ",f=" << f_ << ",N=" << N_ << ")";
    return os.str();
}

StructurePtr Structure::with_precision(int precision) const {
    return make_structure(p_, precision, guard_, steps_, unram_, eis_);
}

const Int& Structure::p_power(int k) const {
    require(k >= 0 && k < static_cast<int>(p_powers_.size()), ErrorCode::budget,
            "p-power exponent " + std::to_string(k) + " exceeds the precision budget");
    return p_powers_[k];
}

std::vector<Int> smallest_irreducible_mod_p(long p, int degree) {
    require(degree >= 1, ErrorCode::invalid_argument, "degree must be >= 1");
    std::vector<long> c(degree, 0);
    for (;;) {
        std::vector<Int> poly(c.begin(), c.end());
        poly.push_back(1);
        if (degree == 1 || is_irreducible_mod_p(poly, p)) return poly;
        int i = 0;
        while (i < degree && ++c[i] == p) c[i++] = 0;
        require(i < degree, ErrorCode::internal_assertion, "no irreducible polynomial found");
    }
}

StructurePtr extend_field(const StructurePtr& base, std::vector<Int> minpoly, TowerStep::Kind kind) {
    require(base != nullptr, ErrorCode::invalid_argument, "null base structure");
    while (minpoly.size() > 1 && minpoly.back() == 0) minpoly.pop_back();
    require(minpoly.size() >= 3, ErrorCode::invalid_argument, "extension polynomial must have degree at least 2");
    require(minpoly.back() == 1, ErrorCode::invalid_argument, "extension polynomial must be monic");
    const long p = base->prime();
    std::vector<TowerStep> steps = base->steps();
    steps.push_back({kind, minpoly});
    if (kind == TowerStep::Kind::eisenstein) {
        require(base->e() == 1, ErrorCode::invalid_argument,
                "nested ramified steps are not supported; supply an absolute Eisenstein polynomial");
        require(base->precision() >= 2, ErrorCode::precision,
                "precision N=" + std::to_string(base->precision()) + " cannot certify the Eisenstein condition");
        const std::size_t d = minpoly.size() - 1;
        require(vp(minpoly[0], p) == 1, ErrorCode::invalid_argument,
                "not Eisenstein: constant term valuation is " +
                    (minpoly[0] == 0 ? std::string("infinite") : std::to_string(vp(minpoly[0], p))));
        for (std::size_t i = 1; i < d; ++i)
            require(vp(minpoly[i], p) >= 1, ErrorCode::invalid_argument,
                    "not Eisenstein: coefficient " + std::to_string(i) + " is a unit");
        return make_structure(p, base->precision(), base->guard(), std::move(steps), base->unramified_poly(), std::move(minpoly));
    }
    require(base->f() == 1, ErrorCode::invalid_argument,
            "nested unramified steps are not supported; supply an absolute unramified polynomial");
    require(is_irreducible_mod_p(minpoly, p), ErrorCode::invalid_argument, "polynomial is reducible modulo p");
    return make_structure(p, base->precision(), base->guard(), std::move(steps), std::move(minpoly), base->eisenstein_poly());
}

bool is_irreducible_mod_p(const std::vector<Int>& poly, long p) {
    PolyP g;
    for (const auto& c : poly) g.push_back(mod_long(c, p));
    trim(g);
    const int d = static_cast<int>(g.size()) - 1;
    if (d < 1) return false;
    if (d == 1) return true;
    // Ben-Or: gcd(x^{p^i} - x, g) = 1 for i <= d/2.
    PolyP x{0, 1};
    PolyP xp = polyp_mod(x, g, p);
    for (int i = 1; i <= d / 2; ++i) {
        PolyP base = xp, acc{1};
        long k = p;
        while (k > 0) {
            if (k & 1) acc = polyp_mulmod(acc, base, g, p);
            base = polyp_mulmod(base, base, g, p);
            k >>= 1;
        }
        xp = acc;
        PolyP diff = xp;
        diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
        diff[1] = ((diff[1] - 1) % p + p) % p;
        trim(diff);
        if (diff.empty()) return false;
        const PolyP gg = polyp_gcd(g, diff, p);
        if (gg.size() > 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// PAdicNumber

PAdicNumber PAdicNumber::from_coefficients(const StructurePtr& s, std::vector<Int> coeffs, int denominator_exponent,
                                           int precision_digits) {
    require(s != nullptr, ErrorCode::invalid_argument, "null structure");
    require(static_cast<int>(coeffs.size()) == s->degree(), ErrorCode::invalid_argument,
            "coefficient count does not match the field degree");
    require(denominator_exponent >= 0, ErrorCode::invalid_argument, "negative denominator exponent");
    PAdicNumber x;
    x.s_ = s;
    x.c_ = std::move(coeffs);
    x.k_ = denominator_exponent;
    x.prec_ = precision_digits;
    x.canonicalize();
    return x;
}

PAdicNumber PAdicNumber::zero(const StructurePtr& s) { return from_int(s, 0); }
PAdicNumber PAdicNumber::one(const StructurePtr& s) { return from_int(s, 1); }

PAdicNumber PAdicNumber::from_int(const StructurePtr& s, const Int& v) {
    std::vector<Int> c(s->degree(), 0);
    c[0] = v;
    return from_coefficients(s, std::move(c), 0, s->cap_digits());
}

PAdicNumber PAdicNumber::from_rational(const StructurePtr& s, const Int& num, const Int& den) {
    require(den != 0, ErrorCode::domain, "rational with zero denominator");
    const long p = s->prime();
    Int d = den;
    int a = 0;
    while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) {
        d /= p;
        ++a;
    }
    const Int& mod = s->p_power(a + s->precision() + s->guard() + 2);
    Int inv;
    Int dm = d % mod;
    if (dm < 0) dm += mod;
    mpz_invert(inv.get_mpz_t(), dm.get_mpz_t(), mod.get_mpz_t());
    std::vector<Int> c(s->degree(), 0);
    c[0] = num * inv;
    return from_coefficients(s, std::move(c), a, s->cap_digits());
}

PAdicNumber PAdicNumber::uniformizer(const StructurePtr& s) {
    std::vector<Int> c(s->degree(), 0);
    if (s->e() == 1)
        c[0] = s->prime();
    else
        c[s->f()] = 1;
    return from_coefficients(s, std::move(c), 0, s->cap_digits());
}

PAdicNumber PAdicNumber::unramified_generator(const StructurePtr& s) {
    std::vector<Int> c(s->degree(), 0);
    if (s->f() == 1)
        c[0] = 1;
    else
        c[1] = 1;
    return from_coefficients(s, std::move(c), 0, s->cap_digits());
}

PAdicNumber PAdicNumber::lift_residue(const StructurePtr& s, const ResidueField::Elem& r) {
    std::vector<Int> c(s->degree(), 0);
    for (int j = 0; j < s->f(); ++j) c[j] = r[j];
    return from_coefficients(s, std::move(c), 0, s->cap_digits());
}

void PAdicNumber::canonicalize() {
    const Structure& S = *s_;
    const int E = S.e(), F = S.f();
    prec_ = std::min(prec_, S.cap_digits());
    bool all_zero = true;
    for (int i = 0; i < E; ++i) {
        const std::int64_t m = k_ + ceil_div(static_cast<std::int64_t>(prec_) - i, E);
        for (int j = 0; j < F; ++j) {
            Int& c = c_[i * F + j];
            if (m <= 0) {
                c = 0;
                continue;
            }
            const Int& mod = S.p_power(static_cast<int>(m));
            mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), mod.get_mpz_t());
            if (c != 0) all_zero = false;
        }
    }
    if (all_zero) {
        k_ = 0;
        return;
    }
    const unsigned long p = static_cast<unsigned long>(S.prime());
    while (k_ > 0) {
        bool divisible = true;
        for (const auto& c : c_)
            if (c != 0 && !mpz_divisible_ui_p(c.get_mpz_t(), p)) {
                divisible = false;
                break;
            }
        if (!divisible) break;
        for (auto& c : c_)
            if (c != 0) mpz_divexact_ui(c.get_mpz_t(), c.get_mpz_t(), p);
        --k_;
    }
}

std::int64_t PAdicNumber::valuation_digits() const {
    const Structure& S = *s_;
    const int E = S.e(), F = S.f();
    std::int64_t best = prec_;
    for (int i = 0; i < E; ++i) {
        int v = 1 << 29;
        for (int j = 0; j < F; ++j) {
            const Int& c = c_[i * F + j];
            if (c != 0) v = std::min(v, vp(c, S.prime()));
        }
        if (v == (1 << 29)) continue;
        best = std::min<std::int64_t>(best, static_cast<std::int64_t>(v - k_) * E + i);
    }
    return best;
}

RationalValuation PAdicNumber::valuation() const {
    const std::int64_t d = valuation_digits();
    if (d >= prec_) return RationalValuation::infinity();
    return RationalValuation(d, s_->e());
}

RationalValuation PAdicNumber::precision() const { return RationalValuation(prec_, s_->e()); }

bool PAdicNumber::is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Int& c) { return c == 0; });
}

ResidueField::Elem PAdicNumber::residue() const {
    require(is_integral(), ErrorCode::domain, "residue of a non-integral element");
    const Structure& S = *s_;
    ResidueField::Elem r(S.f(), 0);
    if (valuation_digits() > 0) return r;
    const Int& pk = S.p_power(k_);
    for (int j = 0; j < S.f(); ++j) {
        Int q = c_[j] / pk;
        r[j] = mod_long(q, S.prime());
    }
    return r;
}

bool PAdicNumber::lies_in_base() const {
    for (std::size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

Int PAdicNumber::base_numerator() const { return c_[0]; }

PAdicNumber PAdicNumber::with_precision(int digits) const {
    PAdicNumber x = *this;
    x.prec_ = std::min(prec_, digits);
    x.canonicalize();
    return x;
}

PAdicNumber PAdicNumber::lift_to(const StructurePtr& target) const {
    require(s_->same_field(*target), ErrorCode::invalid_argument, "lift_to requires the same field");
    PAdicNumber x = *this;
    x.s_ = target;
    x.canonicalize();
    return x;
}

PAdicNumber PAdicNumber::embed(const StructurePtr& target) const {
    if (compatible(*s_, *target)) return *this;
    if (s_->same_field(*target)) return lift_to(target);
    require(s_->is_subfield_of(*target), ErrorCode::invalid_argument,
            "cannot embed " + s_->describe() + " into " + target->describe());
    const int Es = s_->e(), Fs = s_->f(), Et = target->e(), Ft = target->f();
    std::vector<Int> c(target->degree(), 0);
    for (int i = 0; i < Es; ++i)
        for (int j = 0; j < Fs; ++j) {
            const int ti = Es == 1 ? 0 : i;
            c[ti * Ft + j] = c_[i * Fs + j];
        }
    const std::int64_t scaled = static_cast<std::int64_t>(prec_) * (Et / Es);
    return from_coefficients(target, std::move(c), k_,
                             static_cast<int>(std::min<std::int64_t>(scaled, target->cap_digits())));
}

PAdicNumber PAdicNumber::operator+(const PAdicNumber& o) const {
    check_same(*this, o);
    const int K = std::max(k_, o.k_);
    std::vector<Int> c(c_.size());
    const Int& sa = s_->p_power(K - k_);
    const Int& sb = s_->p_power(K - o.k_);
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = c_[i] * sa + o.c_[i] * sb;
    return from_coefficients(s_, std::move(c), K, std::min(prec_, o.prec_));
}

PAdicNumber PAdicNumber::operator-() const {
    PAdicNumber x = *this;
    for (auto& c : x.c_) c = -c;
    x.canonicalize();
    return x;
}

PAdicNumber PAdicNumber::operator-(const PAdicNumber& o) const { return *this + (-o); }

PAdicNumber PAdicNumber::operator*(const PAdicNumber& o) const {
    check_same(*this, o);
    const Structure& S = *s_;
    const int E = S.e(), F = S.f();
    const int W = 2 * F - 1;
    std::vector<Int> tmp((2 * E - 1) * W);
    for (int i1 = 0; i1 < E; ++i1)
        for (int j1 = 0; j1 < F; ++j1) {
            const Int& a = c_[i1 * F + j1];
            if (a == 0) continue;
            for (int i2 = 0; i2 < E; ++i2)
                for (int j2 = 0; j2 < F; ++j2) {
                    const Int& b = o.c_[i2 * F + j2];
                    if (b == 0) continue;
                    mpz_addmul(tmp[(i1 + i2) * W + j1 + j2].get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
                }
        }
    const auto& u = S.unramified_poly();
    const auto& g = S.eisenstein_poly();
    if (F > 1) {
        for (int i = 0; i < 2 * E - 1; ++i)
            for (int j = 2 * F - 2; j >= F; --j) {
                Int& c = tmp[i * W + j];
                if (c == 0) continue;
                for (int l = 0; l < F; ++l)
                    if (u[l] != 0) mpz_submul(tmp[i * W + j - F + l].get_mpz_t(), c.get_mpz_t(), u[l].get_mpz_t());
                c = 0;
            }
    }
    if (E > 1) {
        for (int i = 2 * E - 2; i >= E; --i)
            for (int j = 0; j < F; ++j) {
                Int& c = tmp[i * W + j];
                if (c == 0) continue;
                for (int l = 0; l < E; ++l)
                    if (g[l] != 0) mpz_submul(tmp[(i - E + l) * W + j].get_mpz_t(), c.get_mpz_t(), g[l].get_mpz_t());
                c = 0;
            }
    }
    std::vector<Int> c(E * F);
    for (int i = 0; i < E; ++i)
        for (int j = 0; j < F; ++j) c[i * F + j] = std::move(tmp[i * W + j]);

    const std::int64_t vx = std::min<std::int64_t>(valuation_digits(), prec_);
    const std::int64_t vy = std::min<std::int64_t>(o.valuation_digits(), o.prec_);
    std::int64_t prec = std::min({static_cast<std::int64_t>(prec_) + vy, static_cast<std::int64_t>(o.prec_) + vx,
                                  static_cast<std::int64_t>(prec_) + o.prec_,
                                  static_cast<std::int64_t>(S.cap_digits())});
    return from_coefficients(s_, std::move(c), k_ + o.k_, static_cast<int>(prec));
}

PAdicNumber PAdicNumber::mul_int(const Int& m) const {
    return *this * from_int(s_, m);
}

PAdicNumber PAdicNumber::shift_pi(std::int64_t k) const {
    if (k == 0) return *this;
    const Structure& S = *s_;
    if (S.e() == 1) {
        PAdicNumber x = *this;
        if (k > 0) {
            const Int& pk = S.p_power(static_cast<int>(k));
            for (auto& c : x.c_) c *= pk;
        } else {
            x.k_ += static_cast<int>(-k);
        }
        x.prec_ = static_cast<int>(std::min<std::int64_t>(prec_ + k, S.cap_digits()));
        x.canonicalize();
        return x;
    }
    if (k > 0) return *this * uniformizer(s_).pow(k);
    const PAdicNumber pinv = from_coefficients(s_, S.pi_inverse_coefficients(), 1, S.cap_digits() - 1);
    PAdicNumber r = *this;
    PAdicNumber base = pinv;
    std::int64_t m = -k;
    while (m > 0) {
        if (m & 1) r = r * base;
        m >>= 1;
        if (m > 0) base = base * base;
    }
    return r;
}

PAdicNumber PAdicNumber::inverse() const {
    require(valid(), ErrorCode::invalid_argument, "uninitialized p-adic number");
    require(!is_zero(), ErrorCode::domain, "division by a value indistinguishable from zero");
    const std::int64_t v = valuation_digits();
    const PAdicNumber z = shift_pi(-v);
    const ResidueField& R = s_->residue_field();
    PAdicNumber w = lift_residue(s_, R.inv(z.residue()));
    const PAdicNumber two = from_int(s_, 2);
    int iters = 2;
    for (int c = 1; c < s_->cap_digits() + 2; c *= 2) ++iters;
    for (int it = 0; it < iters; ++it) w = w * (two - z * w);
    return w.shift_pi(-v);
}

PAdicNumber PAdicNumber::operator/(const PAdicNumber& o) const {
    check_same(*this, o);
    return *this * o.inverse();
}

PAdicNumber PAdicNumber::pow(std::int64_t k) const {
    if (k < 0) return inverse().pow(-k);
    PAdicNumber r = one(s_);
    PAdicNumber b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k > 0) b = b * b;
    }
    return r;
}

bool PAdicNumber::equals(const PAdicNumber& o) const { return (*this - o).is_zero(); }

std::string PAdicNumber::key() const {
    const PAdicNumber x = with_precision(std::min(prec_, s_->working_digits()));
    std::ostringstream os;
    os << x.k_;
    const long p = s_->prime();
    for (const auto& c : x.c_) {
        os << '|';
        // Base-p digits, least significant first, so that lexicographic order is
        // the p-adic digit order.
        Int v = c;
        int n = 0;
        while (v != 0 && n < 4096) {
            os << static_cast<char>('0' + (mod_long(v, p) % 75));
            v /= p;
            ++n;
        }
    }
    return os.str();
}

std::string PAdicNumber::to_string() const {
    std::ostringstream os;
    if (s_->degree() == 1) {
        os << c_[0].get_str();
    } else {
        os << "(";
        for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i].get_str();
        os << ")";
    }
    if (k_ > 0) os << "/" << s_->prime() << "^" << k_;
    os << " + O(pi^" << prec_ << ")";
    return os.str();
}

PAdicNumber arith(ArithOp op, const PAdicNumber& x, const PAdicNumber& y) {
    switch (op) {
        case ArithOp::add: return x + y;
        case ArithOp::sub: return x - y;
        case ArithOp::mul: return x * y;
        case ArithOp::div: return x / y;
    }
    fail(ErrorCode::invalid_argument, "unknown arithmetic operation");
}

PAdicNumber teichmuller_lift(const StructurePtr& s, const ResidueField::Elem& residue) {
    const ResidueField& R = s->residue_field();
    require(static_cast<int>(residue.size()) == R.degree(), ErrorCode::invalid_argument,
            "residue has the wrong degree for this structure");
    if (R.is_zero(residue)) return PAdicNumber::zero(s);
    const long q = R.cardinality();
    PAdicNumber w = PAdicNumber::lift_residue(s, residue);
    for (int it = 0; it < s->cap_digits() + 4; ++it) {
        PAdicNumber nw = w.pow(q);
        if (nw.equals(w)) return nw;
        w = std::move(nw);
    }
    fail(ErrorCode::internal_assertion, "Teichmuller iteration did not converge");
}

// ---------------------------------------------------------------------------
// Polynomials over a structure

PAdicNumber poly_eval(const PolyK& poly, const PAdicNumber& x) {
    require(!poly.empty(), ErrorCode::invalid_argument, "empty polynomial");
    PAdicNumber acc = poly.back();
    for (std::size_t i = poly.size() - 1; i-- > 0;) acc = acc * x + poly[i];
    return acc;
}

PolyK poly_derivative(const PolyK& poly) {
    if (poly.size() <= 1) return {PAdicNumber::zero(poly.at(0).structure())};
    PolyK d;
    for (std::size_t i = 1; i < poly.size(); ++i) d.push_back(poly[i].mul_int(static_cast<long>(i)));
    return d;
}

PolyK poly_mul(const PolyK& a, const PolyK& b) {
    require(!a.empty() && !b.empty(), ErrorCode::invalid_argument, "empty polynomial");
    PolyK r(a.size() + b.size() - 1, PAdicNumber::zero(a[0].structure()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

PolyK poly_from_ints(const StructurePtr& s, const std::vector<Int>& coeffs) {
    PolyK r;
    for (const auto& c : coeffs) r.push_back(PAdicNumber::from_int(s, c));
    return r;
}

std::vector<NewtonSegment> newton_polygon(const PolyK& poly) {
    struct Pt {
        std::int64_t x, y;
    };
    std::vector<Pt> pts;
    for (std::size_t i = 0; i < poly.size(); ++i)
        if (!poly[i].is_zero()) pts.push_back({static_cast<std::int64_t>(i), poly[i].valuation_digits()});
    require(!pts.empty(), ErrorCode::precondition, "all coefficients are zero to working precision");
    const int e = poly[0].structure()->e();
    std::vector<Pt> hull;
    for (const auto& pt : pts) {
        while (hull.size() >= 2) {
            const Pt& a = hull[hull.size() - 2];
            const Pt& b = hull.back();
            // Remove b if it lies on or above segment a -> pt.
            const std::int64_t cross = (b.x - a.x) * (pt.y - a.y) - (b.y - a.y) * (pt.x - a.x);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(pt);
    }
    std::vector<NewtonSegment> segs;
    for (std::size_t i = 1; i < hull.size(); ++i) {
        const std::int64_t dx = hull[i].x - hull[i - 1].x, dy = hull[i].y - hull[i - 1].y;
        segs.push_back({RationalValuation(-dy, dx * e), static_cast<int>(dx)});
    }
    std::reverse(segs.begin(), segs.end());
    return segs;
}

PAdicNumber hensel_root(const PolyK& poly, const PAdicNumber& seed) {
    const PolyK d = poly_derivative(poly);
    PAdicNumber x = seed;
    PAdicNumber fx = poly_eval(poly, x);
    if (fx.is_zero()) return x;
    PAdicNumber dx = poly_eval(d, x);
    require(!dx.is_zero() && fx.valuation_digits() > 2 * dx.valuation_digits(), ErrorCode::precondition,
            "Newton condition v(P(x)) > 2 v(P'(x)) fails at the seed");
    for (int it = 0; it < 64; ++it) {
        x = x - fx / dx;
        fx = poly_eval(poly, x);
        if (fx.is_zero()) return x;
        dx = poly_eval(d, x);
    }
    fail(ErrorCode::budget, "Newton iteration exceeded its precision budget");
}

namespace {

PolyK taylor_shift_scaled(const PolyK& g, const PAdicNumber& r) {
    // h(X) = g(r + pi X)
    const std::size_t n = g.size();
    PolyK b = g;
    // Synthetic shift: b(X) = g(X + r).
    for (std::size_t i = 0; i + 1 < n; ++i)
        for (std::size_t j = n - 1; j-- > i;) b[j] = b[j] + r * b[j + 1];
    for (std::size_t k = 1; k < n; ++k) b[k] = b[k].shift_pi(static_cast<std::int64_t>(k));
    return b;
}

void roots_rec(const PolyK& h, const PAdicNumber& base, std::int64_t depth, std::vector<PAdicNumber>& out) {
    const StructurePtr& S = h[0].structure();
    std::int64_t m = -1;
    for (const auto& c : h)
        if (!c.is_zero()) {
            const std::int64_t v = c.valuation_digits();
            m = (m < 0) ? v : std::min(m, v);
        }
    if (m < 0 || depth > S->cap_digits()) {
        out.push_back(base);
        return;
    }
    PolyK g;
    g.reserve(h.size());
    for (const auto& c : h) g.push_back(c.shift_pi(-m));
    const ResidueField& R = S->residue_field();
    std::vector<ResidueField::Elem> gbar;
    for (const auto& c : g) gbar.push_back(c.is_integral() ? c.residue() : R.zero());
    int deg = -1;
    for (int i = static_cast<int>(gbar.size()) - 1; i >= 0; --i)
        if (!R.is_zero(gbar[i])) {
            deg = i;
            break;
        }
    if (deg <= 0) return;
    const long q = R.cardinality();
    for (long idx = 0; idx < q; ++idx) {
        const auto r = R.element(idx);
        auto val = R.zero(), der = R.zero();
        for (int i = deg; i >= 0; --i) val = R.add(R.mul(val, r), gbar[i]);
        for (int i = deg; i >= 1; --i) der = R.add(R.mul(der, r), R.mul(gbar[i], R.element(i % S->prime())));
        if (!R.is_zero(val)) continue;
        const PAdicNumber lift = PAdicNumber::lift_residue(S, r);
        if (!R.is_zero(der)) {
            const PAdicNumber y = hensel_root(g, lift);
            out.push_back(base + y.shift_pi(depth));
        } else {
            roots_rec(taylor_shift_scaled(g, lift), base + lift.shift_pi(depth), depth + 1, out);
        }
    }
}

}  // namespace

std::vector<PAdicNumber> integral_roots(const PolyK& poly) {
    require(!poly.empty(), ErrorCode::invalid_argument, "empty polynomial");
    std::vector<PAdicNumber> raw;
    roots_rec(poly, PAdicNumber::zero(poly[0].structure()), 0, raw);
    std::vector<PAdicNumber> out;
    for (auto& r : raw) {
        bool dup = false;
        for (const auto& o : out)
            if (o.equals(r)) {
                dup = true;
                break;
            }
        if (!dup) out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const PAdicNumber& a, const PAdicNumber& b) { return a.key() < b.key(); });
    return out;
}

}  // namespace padmm
