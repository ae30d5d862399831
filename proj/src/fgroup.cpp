#include "padmm/fgroup.hpp"

#include <sstream>

namespace padmm {

namespace {

TruncatedSeries var(const StructurePtr& s, int n, int D, int i) { return TruncatedSeries::variable(s, n, D, i); }

TruncatedSeries one_dim_law(const FormalGroupLaw& F) {
    require(F.dimension() == 1, ErrorCode::invalid_argument, "operation needs a one-dimensional law");
    return F.law()[0];
}

// F(A, B) for one-dimensional F and inner series A, B in the same variables.
TruncatedSeries apply2(const TruncatedSeries& F, const TruncatedSeries& A, const TruncatedSeries& B) {
    return compose(F, {A, B});
}

}  // namespace

const char* group_kind_name(GroupKind k) {
    switch (k) {
        case GroupKind::additive: return "additive";
        case GroupKind::multiplicative: return "multiplicative";
        case GroupKind::lubin_tate: return "lubin_tate";
        case GroupKind::from_log: return "from_log";
        case GroupKind::product: return "product";
        case GroupKind::custom: return "custom";
    }
    return "unknown";
}

std::string HeightResult::to_string() const {
    if (finite) return std::to_string(height);
    return "infinite-at-precision(>" + std::to_string(lower_bound) + ")";
}

TruncatedSeries law_in_variables(const TruncatedSeries& law, int n, int x, int y) { return law.remap(n, {x, y}); }

FormalGroupLaw::FormalGroupLaw(GroupKind kind, StructurePtr s, int n, int D, std::vector<TruncatedSeries> law)
    : kind_(kind), s_(std::move(s)), n_(n), D_(D), law_(std::move(law)) {}

FormalGroupPtr FormalGroupLaw::finish(std::shared_ptr<FormalGroupLaw> g) {
    g->self_ = g;
    if (g->factors_.empty()) g->factors_.push_back(g);
    return g;
}

FormalGroupPtr FormalGroupLaw::additive(const StructurePtr& s, int D) {
    auto law = var(s, 2, D, 0) + var(s, 2, D, 1);
    return finish(std::make_shared<FormalGroupLaw>(GroupKind::additive, s, 1, D, std::vector{law}));
}

FormalGroupPtr FormalGroupLaw::multiplicative(const StructurePtr& s, int D) {
    auto X = var(s, 2, D, 0), Y = var(s, 2, D, 1);
    auto g = std::make_shared<FormalGroupLaw>(GroupKind::multiplicative, s, 1, D, std::vector{X + Y + X * Y});
    std::vector<Int> dp;
    const long p = s->prime();
    Int binom = 1;
    dp.push_back(0);
    for (long k = 1; k <= p; ++k) {
        binom = binom * (p - k + 1) / k;
        dp.push_back(binom);
    }
    g->divpoly_ = dp;
    return finish(g);
}

FormalGroupPtr FormalGroupLaw::lubin_tate(const StructurePtr& s, int D, const TruncatedSeries& f_in) {
    require(f_in.variables() == 1, ErrorCode::invalid_argument, "Lubin-Tate series must be univariate");
    require(s->e() == 1, ErrorCode::invalid_argument, "Lubin-Tate laws are built over unramified bases");
    const TruncatedSeries f = f_in.lift_to(s);
    const long q = s->residue_cardinality();
    require(f.coeff(0).is_zero(), ErrorCode::precondition, "Lubin-Tate series needs zero constant term");
    require(D >= 1 && !f.coeff(1).is_zero() && f.coeff(1).valuation() == RationalValuation(1),
            ErrorCode::precondition, "linear coefficient of the Lubin-Tate series must be a uniformizer");
    require(q <= f.cap(), ErrorCode::precondition,
            "degree cap below q: the congruence f = X^q mod pi cannot be checked");
    for (int k = 2; k <= f.cap(); ++k) {
        const PAdicNumber c = f.coeff(Exponent{k});
        const PAdicNumber target = k == q ? c - PAdicNumber::one(s) : c;
        require(target.is_zero() || target.valuation() >= RationalValuation(1), ErrorCode::precondition,
                "Lubin-Tate congruence f = X^q mod pi fails at degree " + std::to_string(k));
    }
    const PAdicNumber pi = f.coeff(1);

    const StructurePtr S = s;
    require(f.exact() || f.cap() >= D, ErrorCode::precondition, "Lubin-Tate series is truncated below the degree cap");
    const TruncatedSeries fe = f.with_cap(D).lift_to(S);
    const PAdicNumber pie = pi.lift_to(S);
    TruncatedSeries G = var(S, 2, 1, 0) + var(S, 2, 1, 1);
    for (int k = 2; k <= D; ++k) {
        G = G.with_cap(k);
        const TruncatedSeries fk = fe.with_cap(k);
        const TruncatedSeries fX = fk.remap(2, {0}), fY = fk.remap(2, {1});
        const TruncatedSeries lhs = apply2(G, fX, fY);
        const TruncatedSeries rhs = compose(fk, {G});
        const TruncatedSeries E = lhs - rhs;
        const PAdicNumber denom = pie - pie.pow(k);
        const MonomialIndex& I = G.index();
        for (std::size_t i = I.count_up_to(k - 1); i < I.count_up_to(k); ++i) {
            const PAdicNumber& e = E.coeff(i);
            if (e.is_zero()) continue;
            require(e.valuation() >= RationalValuation(1), ErrorCode::internal_assertion,
                    "Lubin-Tate recursion produced a non-integral coefficient");
            G.set(i, e / denom);
        }
        // Uniqueness: lower degrees must already agree.
        for (std::size_t i = 0; i < I.count_up_to(k - 1); ++i)
            require(E.coeff(i).is_zero(), ErrorCode::internal_assertion, "Lubin-Tate recursion lost a lower degree");
    }
    TruncatedSeries law = G.lift_to(s);
    law.set_tail(RationalValuation(0));
    auto g = std::make_shared<FormalGroupLaw>(GroupKind::lubin_tate, s, 1, D, std::vector{law});
    g->param_ = f;
    if (f.exact()) {
        std::vector<Int> dp;
        int top = 0;
        for (int k = 0; k <= f.cap(); ++k)
            if (!f.coeff(Exponent{k}).is_zero()) top = k;
        bool integral_coeffs = true;
        for (int k = 0; k <= top; ++k) {
            const PAdicNumber c = f.coeff(Exponent{k});
            if (s->degree() != 1 || !c.lies_in_base() || c.denominator_exponent() != 0) integral_coeffs = false;
            else {
                // Balanced representative keeps small integers small.
                Int v = c.base_numerator();
                const int m = c.precision_digits();
                if (m > 0 && 2 * v > s->p_power(m)) v -= s->p_power(m);
                dp.push_back(v);
            }
        }
        if (integral_coeffs) g->divpoly_ = dp;
    }
    return finish(g);
}

FormalGroupPtr FormalGroupLaw::from_log(const StructurePtr& s, int D, const TruncatedSeries& ell_in) {
    require(ell_in.variables() == 1, ErrorCode::invalid_argument, "logarithm must be univariate");
    const TruncatedSeries ell = ell_in.lift_to(s);
    require(ell.coeff(0).is_zero(), ErrorCode::precondition, "logarithm needs l(0) = 0");
    require(ell.cap() >= 1 && ell.coeff(1).equals(PAdicNumber::one(s)), ErrorCode::precondition,
            "logarithm needs l'(0) = 1");
    const StructurePtr S = s;
    const TruncatedSeries le = ell.lift_to(S).with_cap(std::min(ell.cap(), D));
    require(le.cap() >= D || le.exact(), ErrorCode::precondition, "logarithm is truncated below the degree cap");
    const TruncatedSeries l = le.exact() ? le.with_cap(D) : le;
    const TruncatedSeries e = reversion(l);
    const TruncatedSeries sum = l.remap(2, {0}) + l.remap(2, {1});
    TruncatedSeries law = compose(e, {sum});
    const MonomialIndex& I = law.index();
    for (std::size_t i = 0; i < law.size(); ++i) {
        const PAdicNumber& c = law.coeff(i);
        if (c.is_zero()) continue;
        if (!c.is_integral()) {
            std::ostringstream os;
            const Exponent& ex = I.exponent(i);
            os << "law from logarithm is not integral at coefficient (" << ex[0] << "," << ex[1] << ")";
            fail(ErrorCode::domain, os.str());
        }
    }
    law = law.lift_to(s);
    law.set_tail(RationalValuation(0));
    auto g = std::make_shared<FormalGroupLaw>(GroupKind::from_log, s, 1, D, std::vector{law});
    g->param_ = ell;
    return finish(g);
}

FormalGroupPtr FormalGroupLaw::product(const std::vector<FormalGroupPtr>& factors) {
    require(!factors.empty(), ErrorCode::invalid_argument, "product of no laws");
    if (factors.size() == 1) return factors[0];
    const StructurePtr& s = factors[0]->structure();
    const int D = factors[0]->cap();
    const int n = static_cast<int>(factors.size());
    std::vector<TruncatedSeries> comps;
    for (int i = 0; i < n; ++i) {
        const auto& F = factors[i];
        require(F->dimension() == 1, ErrorCode::invalid_argument, "product factors must be one-dimensional");
        require(F->cap() == D && F->structure()->same_field(*s) && F->structure()->precision() == s->precision(),
                ErrorCode::invalid_argument, "product factors must share structure and degree cap");
        comps.push_back(F->law()[0].remap(2 * n, {i, n + i}));
    }
    auto g = std::make_shared<FormalGroupLaw>(GroupKind::product, s, n, D, std::move(comps));
    g->factors_ = factors;
    return finish(g);
}

FormalGroupPtr FormalGroupLaw::custom(const TruncatedSeries& law) {
    require(law.variables() == 2, ErrorCode::invalid_argument, "custom laws must be series in two variables");
    return finish(
        std::make_shared<FormalGroupLaw>(GroupKind::custom, law.structure(), 1, law.cap(), std::vector{law}));
}

std::string FormalGroupLaw::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case GroupKind::lubin_tate: os << "lubin_tate(" << param_->to_string() << ")"; break;
        case GroupKind::from_log: os << "from_log(" << param_->to_string() << ")"; break;
        case GroupKind::product:
            os << "product(";
            for (std::size_t i = 0; i < factors_.size(); ++i) os << (i ? ", " : "") << factors_[i]->describe();
            os << ")";
            break;
        default: os << group_kind_name(kind_);
    }
    return os.str();
}

TruncatedSeries FormalGroupLaw::inverse_series() const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (inverse_cache_) return *inverse_cache_;
    }
    const TruncatedSeries F = one_dim_law(*this);
    const TruncatedSeries X = var(s_, 1, D_, 0);
    TruncatedSeries iota = -X;
    for (int k = 0; k <= D_; ++k) {
        const TruncatedSeries r = apply2(F, X, iota);
        if (r.is_zero()) break;
        iota = iota - r;
    }
    require(apply2(F, X, iota).is_zero(), ErrorCode::internal_assertion, "inverse series did not converge");
    if (F.exact() && kind_ == GroupKind::additive) iota.set_exact();
    else iota.set_tail(min(RationalValuation(0), iota.min_valuation()));
    std::lock_guard<std::mutex> lock(mu_);
    inverse_cache_ = iota;
    return iota;
}

TruncatedSeries FormalGroupLaw::mult_by(std::int64_t m) const {
    require(n_ == 1, ErrorCode::invalid_argument, "mult_by needs a one-dimensional law (use mult_by_components)");
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = mult_cache_.find(m);
        if (it != mult_cache_.end()) return it->second;
    }
    TruncatedSeries r;
    const TruncatedSeries X = var(s_, 1, D_, 0);
    if (m == 0) {
        r = TruncatedSeries(s_, 1, D_);
    } else if (m == 1) {
        r = X;
    } else if (m < 0) {
        r = compose(inverse_series(), {mult_by(-m)});
    } else {
        const TruncatedSeries half = mult_by(m / 2);
        r = apply2(law_[0], half, half);
        if (m % 2) r = apply2(law_[0], r, X);
    }
    std::lock_guard<std::mutex> lock(mu_);
    mult_cache_.emplace(m, r);
    return r;
}

std::vector<TruncatedSeries> FormalGroupLaw::mult_by_components(std::int64_t m) const {
    std::vector<TruncatedSeries> out;
    for (const auto& F : factors_) out.push_back(F->mult_by(m));
    return out;
}

TruncatedSeries FormalGroupLaw::log() const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (log_cache_) return *log_cache_;
    }
    const TruncatedSeries F = one_dim_law(*this);
    const StructurePtr S = s_;
    const TruncatedSeries Fe = F.lift_to(S);
    // d/dY F(X, Y) at Y = 0, as a series in X.
    const TruncatedSeries dF = Fe.derivative(1);
    TruncatedSeries g(S, 1, D_);
    const MonomialIndex& I = dF.index();
    for (std::size_t i = 0; i < dF.size(); ++i) {
        const Exponent& e = I.exponent(i);
        if (e[1] == 0) g.set(Exponent{e[0]}, dF.coeff(i));
    }
    if (!dF.exact()) g.set_tail(dF.tail_bound());
    TruncatedSeries l = multiplicative_inverse(g).integrate().lift_to(s_);
    if (kind_ == GroupKind::additive) l.set_exact();
    else l.set_tail(min(RationalValuation(0), l.min_valuation()));
    std::lock_guard<std::mutex> lock(mu_);
    log_cache_ = l;
    return l;
}

TruncatedSeries FormalGroupLaw::exp() const {
    {
        std::lock_guard<std::mutex> lock(mu_);
        if (exp_cache_) return *exp_cache_;
    }
    const StructurePtr S = s_;
    TruncatedSeries e = reversion(log().lift_to(S)).lift_to(s_);
    if (kind_ == GroupKind::additive) e.set_exact();
    std::lock_guard<std::mutex> lock(mu_);
    exp_cache_ = e;
    return e;
}

HeightResult FormalGroupLaw::height() const {
    const TruncatedSeries P = mult_by(s_->prime());
    HeightResult h;
    for (int k = 1; k <= D_; ++k) {
        const PAdicNumber c = P.coeff(Exponent{k});
        if (c.is_zero() || !c.is_unit()) continue;
        // Lowest unit coefficient must sit at a power of q = p^f... of p.
        long pk = 1;
        int hh = 0;
        while (pk < k) {
            pk *= s_->prime();
            ++hh;
        }
        require(pk == k, ErrorCode::internal_assertion,
                "lowest unit term of [p] has degree " + std::to_string(k) + ", not a power of p");
        h.finite = true;
        h.height = hh;
        return h;
    }
    long pk = 1;
    int lb = 0;
    while (pk * s_->prime() <= D_) {
        pk *= s_->prime();
        ++lb;
    }
    h.finite = false;
    h.lower_bound = lb;
    return h;
}

// ---------------------------------------------------------------------------
// Points

FormalGroupLaw::PointValue FormalGroupLaw::add(const std::vector<PAdicNumber>& P,
                                               const std::vector<PAdicNumber>& Q) const {
    require(static_cast<int>(P.size()) == n_ && static_cast<int>(Q.size()) == n_, ErrorCode::invalid_argument,
            "point dimension mismatch");
    PointValue out;
    for (int i = 0; i < n_; ++i) {
        const Evaluation ev = evaluate(factors_[i]->law()[0], {P[i], Q[i].embed(P[i].structure())});
        out.coords.push_back(ev.value);
        out.tail_bound = min(out.tail_bound, ev.tail_bound);
    }
    return out;
}

FormalGroupLaw::PointValue FormalGroupLaw::negate(const std::vector<PAdicNumber>& P) const {
    require(static_cast<int>(P.size()) == n_, ErrorCode::invalid_argument, "point dimension mismatch");
    PointValue out;
    for (int i = 0; i < n_; ++i) {
        const auto kind = factors_[i]->kind();
        if (kind == GroupKind::additive) {
            out.coords.push_back(-P[i]);
        } else if (kind == GroupKind::multiplicative) {
            // (1+x)^{-1} - 1
            const PAdicNumber one = PAdicNumber::one(P[i].structure());
            out.coords.push_back((one + P[i]).inverse() - one);
        } else {
            const Evaluation ev = evaluate(factors_[i]->inverse_series(), {P[i]});
            out.coords.push_back(ev.value);
            out.tail_bound = min(out.tail_bound, ev.tail_bound);
        }
    }
    return out;
}

FormalGroupLaw::PointValue FormalGroupLaw::subtract(const std::vector<PAdicNumber>& P,
                                                    const std::vector<PAdicNumber>& Q) const {
    const PointValue nq = negate(Q);
    PointValue s = add(P, nq.coords);
    s.tail_bound = min(s.tail_bound, nq.tail_bound);
    return s;
}

FormalGroupLaw::PointValue FormalGroupLaw::multiply(std::int64_t m, const std::vector<PAdicNumber>& P) const {
    require(static_cast<int>(P.size()) == n_, ErrorCode::invalid_argument, "point dimension mismatch");
    PointValue out;
    for (int i = 0; i < n_; ++i) {
        const FormalGroupLaw& F = *factors_[i];
        const StructurePtr& T = P[i].structure();
        if (F.law()[0].exact()) {
            // Double-and-add on points: exact for polynomial laws.
            std::int64_t k = m < 0 ? -m : m;
            PAdicNumber acc = PAdicNumber::zero(T), base = P[i];
            while (k > 0) {
                if (k & 1) acc = F.add({acc}, {base}).coords[0];
                k >>= 1;
                if (k > 0) base = F.add({base}, {base}).coords[0];
            }
            if (m < 0) acc = F.negate({acc}).coords[0];
            out.coords.push_back(acc);
        } else {
            const Evaluation ev = evaluate(F.mult_by(m), {P[i]});
            out.coords.push_back(ev.value);
            out.tail_bound = min(out.tail_bound, ev.tail_bound);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Axioms and homomorphisms

namespace {

std::optional<Exponent> identity_failure(const TruncatedSeries& F) {
    // F(X, 0) = X and F(0, Y) = Y.
    const MonomialIndex& I = F.index();
    const StructurePtr& s = F.structure();
    for (std::size_t i = 0; i < F.size(); ++i) {
        const Exponent& e = I.exponent(i);
        if (e[0] != 0 && e[1] != 0) continue;
        const bool linear = (e[0] + e[1]) == 1;
        const PAdicNumber want = linear ? PAdicNumber::one(s) : PAdicNumber::zero(s);
        if (!F.coeff(i).equals(want)) return e;
    }
    return std::nullopt;
}

void check_one(const FormalGroupLaw& F, int comp, AxiomReport& r) {
    const TruncatedSeries L = F.law()[0];
    const StructurePtr& s = L.structure();
    const int D = L.cap();
    if (auto e = identity_failure(L)) {
        r.identity = false;
        if (!r.identity_failure) r.identity_failure = {comp, *e};
    }
    if (auto e = L.first_difference(L.remap(2, {1, 0}))) {
        r.commutativity = false;
        if (!r.commutativity_failure) r.commutativity_failure = {comp, *e};
    }
    for (std::size_t i = 0; i < L.size(); ++i) {
        const PAdicNumber& c = L.coeff(i);
        if (!c.is_zero() && !c.is_integral()) {
            r.integrality = false;
            if (!r.integrality_failure) r.integrality_failure = {comp, L.index().exponent(i)};
            break;
        }
    }
    // F(F(X,Y),Z) = F(X,F(Y,Z)) in three variables.
    const TruncatedSeries X = var(s, 3, D, 0), Y = var(s, 3, D, 1), Z = var(s, 3, D, 2);
    const TruncatedSeries FXY = L.remap(3, {0, 1}), FYZ = L.remap(3, {1, 2});
    const TruncatedSeries lhs = apply2(L, FXY, Z);
    const TruncatedSeries rhs = apply2(L, X, FYZ);
    if (auto e = lhs.first_difference(rhs)) {
        r.associativity = false;
        if (!r.associativity_failure) r.associativity_failure = {comp, *e};
    }
}

}  // namespace

AxiomReport check_axioms(const FormalGroupLaw& F) {
    AxiomReport r;
    // Components of a product act on disjoint variables, so the axioms hold
    // for the product exactly when they hold for every factor.
    for (std::size_t i = 0; i < F.factors().size(); ++i) check_one(*F.factors()[i], static_cast<int>(i), r);
    return r;
}

HomomorphismReport is_homomorphism(const TruncatedSeries& h_in, const FormalGroupLaw& F, const FormalGroupLaw& G) {
    require(F.dimension() == 1 && G.dimension() == 1, ErrorCode::invalid_argument,
            "homomorphism test needs one-dimensional laws");
    require(h_in.variables() == 1, ErrorCode::invalid_argument, "h must be univariate");
    require(h_in.coeff(0).is_zero(), ErrorCode::precondition, "h needs h(0) = 0");
    const StructurePtr& s = F.structure();
    const int D = std::min({F.cap(), G.cap(), h_in.cap()});
    const TruncatedSeries h = h_in.lift_to(s).with_cap(D);
    const TruncatedSeries LF = F.law()[0].with_cap(D), LG = G.law()[0].lift_to(s).with_cap(D);
    HomomorphismReport r;
    const TruncatedSeries lhs = compose(h, {LF});
    const TruncatedSeries rhs = apply2(LG, h.remap(2, {0}), h.remap(2, {1}));
    r.failure = lhs.first_difference(rhs);
    r.homomorphism = !r.failure.has_value();
    const TruncatedSeries c1 = compose(h, {F.mult_by(2).with_cap(D)});
    const TruncatedSeries c2 = compose(G.mult_by(2).lift_to(s).with_cap(D), {h});
    r.commutation_failure = c1.first_difference(c2);
    r.commutes_with_two = !r.commutation_failure.has_value();
    return r;
}

}  // namespace padmm
