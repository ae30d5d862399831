#include "padmm/series.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <mutex>
#include <sstream>

namespace padmm {

namespace {

constexpr int kMaxVars = 16;

int digits_of(const RationalValuation& v, int e) {
    if (v.is_infinite()) return 1 << 28;
    return static_cast<int>(v.floor_scaled(e));
}

RationalValuation times(const RationalValuation& v, int k) {
    if (v.is_infinite()) return v;
    return v * k;
}

}  // namespace

// ---------------------------------------------------------------------------
// MonomialIndex

std::shared_ptr<const MonomialIndex> MonomialIndex::get(int n, int D) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const MonomialIndex>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{n, D}];
    if (!slot) slot = std::make_shared<const MonomialIndex>(n, D);
    return slot;
}

MonomialIndex::MonomialIndex(int n, int D) : n_(n), D_(D) {
    require(n >= 1 && n <= kMaxVars, ErrorCode::invalid_argument, "variable count out of range");
    require(D >= 0, ErrorCode::invalid_argument, "negative degree cap");
    const int top = D + n + 1;
    binom_.assign(top + 1, std::vector<std::size_t>(top + 1, 0));
    for (int a = 0; a <= top; ++a) {
        binom_[a][0] = 1;
        for (int b = 1; b <= a; ++b) binom_[a][b] = binom_[a - 1][b - 1] + binom_[a - 1][b];
    }
    Exponent cur(n, 0);
    for (int d = 0; d <= D; ++d) {
        by_degree_.push_back(exps_.size());
        // Enumerate exponents of total degree d, X_1 exponent descending.
        auto rec = [&](auto&& self, int pos, int remaining) -> void {
            if (pos == n - 1) {
                cur[pos] = remaining;
                exps_.push_back(cur);
                deg_.push_back(d);
                return;
            }
            for (int v = remaining; v >= 0; --v) {
                cur[pos] = v;
                self(self, pos + 1, remaining - v);
            }
        };
        rec(rec, 0, d);
    }
    by_degree_.push_back(exps_.size());
    pivot_.assign(exps_.size(), -1);
    parent_.assign(exps_.size(), npos);
    for (std::size_t i = 1; i < exps_.size(); ++i) {
        Exponent e = exps_[i];
        int k = 0;
        while (e[k] == 0) ++k;
        --e[k];
        pivot_[i] = k;
        parent_[i] = rank(e);
    }
}

std::size_t MonomialIndex::count_up_to(int d) const {
    if (d < 0) return 0;
    if (d > D_) d = D_;
    return by_degree_[d + 1];
}

std::size_t MonomialIndex::rank(const int* e) const {
    int d = 0;
    for (int i = 0; i < n_; ++i) d += e[i];
    if (d > D_) return npos;
    std::size_t r = by_degree_[d];
    int remaining = d;
    for (int i = 0; i + 1 < n_; ++i) {
        const int k = n_ - i - 1;
        const int s = remaining - e[i] - 1;
        if (s >= 0) r += binom_[s + k][k];
        remaining -= e[i];
    }
    return r;
}

std::size_t MonomialIndex::sum_index(std::size_t i, std::size_t j) const {
    std::array<int, kMaxVars> e{};
    const Exponent& a = exps_[i];
    const Exponent& b = exps_[j];
    for (int k = 0; k < n_; ++k) e[k] = a[k] + b[k];
    return rank(e.data());
}

// ---------------------------------------------------------------------------
// TruncatedSeries

TruncatedSeries::TruncatedSeries(StructurePtr s, int n, int D)
    : s_(std::move(s)), n_(n), D_(D), idx_(MonomialIndex::get(n, D)) {
    require(s_ != nullptr, ErrorCode::invalid_argument, "null structure");
    c_.assign(idx_->size(), PAdicNumber::zero(s_));
}

TruncatedSeries TruncatedSeries::variable(const StructurePtr& s, int n, int D, int i) {
    require(i >= 0 && i < n, ErrorCode::invalid_argument, "variable index out of range");
    TruncatedSeries r(s, n, D);
    if (D >= 1) {
        Exponent e(n, 0);
        e[i] = 1;
        r.set(e, PAdicNumber::one(s));
    }
    return r;
}

TruncatedSeries TruncatedSeries::constant(const StructurePtr& s, int n, int D, const PAdicNumber& c) {
    TruncatedSeries r(s, n, D);
    r.c_[0] = c.embed(s);
    return r;
}

TruncatedSeries TruncatedSeries::univariate(const StructurePtr& s, int D, const std::vector<PAdicNumber>& coeffs) {
    TruncatedSeries r(s, 1, D);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (static_cast<int>(i) > D) {
            if (!coeffs[i].is_zero()) {
                r.exact_ = false;
                r.tail_ = min(r.tail_, coeffs[i].valuation());
            }
            continue;
        }
        r.c_[i] = coeffs[i].embed(s);
    }
    return r;
}

PAdicNumber TruncatedSeries::coeff(const Exponent& e) const {
    require(static_cast<int>(e.size()) == n_, ErrorCode::invalid_argument, "exponent length mismatch");
    const std::size_t i = idx_->rank(e);
    if (i == MonomialIndex::npos) return PAdicNumber::zero(s_);
    return c_[i];
}

void TruncatedSeries::set(const Exponent& e, PAdicNumber v) {
    require(static_cast<int>(e.size()) == n_, ErrorCode::invalid_argument, "exponent length mismatch");
    const std::size_t i = idx_->rank(e);
    require(i != MonomialIndex::npos, ErrorCode::invalid_argument, "exponent exceeds the degree cap");
    c_[i] = std::move(v);
}

void TruncatedSeries::set_tail(const RationalValuation& bound) {
    exact_ = false;
    tail_ = bound;
}

bool TruncatedSeries::integral() const {
    return std::all_of(c_.begin(), c_.end(), [](const PAdicNumber& x) { return x.is_zero() || x.is_integral(); });
}

RationalValuation TruncatedSeries::min_valuation() const {
    RationalValuation m = RationalValuation::infinity();
    for (const auto& x : c_)
        if (!x.is_zero()) m = min(m, x.valuation());
    return m;
}

RationalValuation TruncatedSeries::coefficient_floor() const {
    RationalValuation m = min_valuation();
    if (!exact_) m = min(m, tail_);
    return m;
}

int TruncatedSeries::order() const {
    for (std::size_t i = 0; i < c_.size(); ++i)
        if (!c_[i].is_zero()) return idx_->degree(i);
    return D_ + 1;
}

bool TruncatedSeries::is_zero() const { return order() > D_; }

void TruncatedSeries::check_compatible(const TruncatedSeries& o) const {
    require(s_ && o.s_, ErrorCode::invalid_argument, "uninitialized series");
    require(n_ == o.n_ && D_ == o.D_, ErrorCode::invalid_argument, "series shape mismatch");
    require(s_->same_field(*o.s_) && s_->precision() == o.s_->precision() && s_->guard() == o.s_->guard(),
            ErrorCode::invalid_argument,
            "series structure mismatch");
}

TruncatedSeries TruncatedSeries::operator+(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r = *this;
    for (std::size_t i = 0; i < c_.size(); ++i) r.c_[i] += o.c_[i];
    r.exact_ = exact_ && o.exact_;
    r.tail_ = RationalValuation::infinity();
    if (!exact_) r.tail_ = min(r.tail_, tail_);
    if (!o.exact_) r.tail_ = min(r.tail_, o.tail_);
    return r;
}

TruncatedSeries TruncatedSeries::operator-() const {
    TruncatedSeries r = *this;
    for (auto& x : r.c_)
        if (!x.is_zero()) x = -x;
    return r;
}

TruncatedSeries TruncatedSeries::operator-(const TruncatedSeries& o) const { return *this + (-o); }

namespace {

int max_degree(const TruncatedSeries& f) {
    for (std::size_t i = f.size(); i-- > 0;)
        if (!f.coeff(i).is_zero()) return f.index().degree(i);
    return -1;
}

}  // namespace

TruncatedSeries TruncatedSeries::operator*(const TruncatedSeries& o) const {
    check_compatible(o);
    TruncatedSeries r(s_, n_, D_);
    const MonomialIndex& I = *idx_;
    const int la = order(), lb = o.order();
    const int ma = max_degree(*this), mb = o.D_ >= 0 ? max_degree(o) : -1;
    if (ma >= 0 && mb >= 0) {
        const std::size_t a_begin = I.count_up_to(la - 1), a_end = I.count_up_to(std::min(ma, D_ - lb));
        const std::size_t b_begin = I.count_up_to(lb - 1);
        for (std::size_t i = a_begin; i < a_end; ++i) {
            const PAdicNumber& a = c_[i];
            if (a.is_zero()) continue;
            const std::size_t b_end = I.count_up_to(std::min(mb, D_ - I.degree(i)));
            for (std::size_t j = b_begin; j < b_end; ++j) {
                const PAdicNumber& b = o.c_[j];
                if (b.is_zero()) continue;
                PAdicNumber& dst = r.c_[I.sum_index(i, j)];
                dst = dst + a * b;
            }
        }
    }
    const bool truncated = ma >= 0 && mb >= 0 && ma + mb > D_;
    r.exact_ = exact_ && o.exact_ && !truncated;
    if (!r.exact_) {
        RationalValuation t = RationalValuation::infinity();
        const RationalValuation fa = coefficient_floor(), fb = o.coefficient_floor();
        if (truncated || !exact_ || !o.exact_) t = fa + fb;
        r.tail_ = t;
    }
    return r;
}

TruncatedSeries TruncatedSeries::scale(const PAdicNumber& a) const {
    TruncatedSeries r = *this;
    const PAdicNumber b = a.embed(s_);
    for (auto& x : r.c_)
        if (!x.is_zero()) x = x * b;
    if (!exact_) r.tail_ = tail_ + (b.is_zero() ? RationalValuation::infinity() : b.valuation());
    return r;
}

TruncatedSeries TruncatedSeries::pow(int k) const {
    require(k >= 0, ErrorCode::invalid_argument, "negative series power");
    TruncatedSeries r = constant(s_, n_, D_, PAdicNumber::one(s_));
    TruncatedSeries b = *this;
    while (k > 0) {
        if (k & 1) r = r * b;
        k >>= 1;
        if (k > 0) b = b * b;
    }
    return r;
}

TruncatedSeries TruncatedSeries::remap(int n, const std::vector<int>& map) const {
    require(static_cast<int>(map.size()) == n_, ErrorCode::invalid_argument, "variable map has the wrong length");
    TruncatedSeries r(s_, n, D_);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        Exponent e(n, 0);
        const Exponent& src = idx_->exponent(i);
        for (int k = 0; k < n_; ++k) {
            require(map[k] >= 0 && map[k] < n, ErrorCode::invalid_argument, "variable map out of range");
            e[map[k]] += src[k];
        }
        r.set(e, r.coeff(e) + c_[i]);
    }
    r.exact_ = exact_;
    r.tail_ = tail_;
    return r;
}

TruncatedSeries TruncatedSeries::with_cap(int D) const {
    if (D == D_) return *this;
    if (D > D_) require(exact_, ErrorCode::precondition, "cannot raise the degree cap of a truncated series");
    TruncatedSeries r(s_, n_, D);
    bool dropped = false;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (idx_->degree(i) > D) {
            dropped |= !c_[i].is_zero();
            continue;
        }
        r.c_[i] = c_[i];
    }
    r.exact_ = exact_ && !dropped;
    r.tail_ = r.exact_ ? RationalValuation::infinity() : coefficient_floor();
    return r;
}

TruncatedSeries TruncatedSeries::with_precision(int digits) const {
    TruncatedSeries r = *this;
    for (auto& x : r.c_) x = x.with_precision(digits);
    return r;
}

TruncatedSeries TruncatedSeries::lift_to(const StructurePtr& s) const {
    TruncatedSeries r = *this;
    r.s_ = s;
    for (auto& x : r.c_) x = x.embed(s);
    if (!exact_ && s->e() != s_->e()) r.tail_ = tail_;
    return r;
}

TruncatedSeries TruncatedSeries::map_coefficients(const StructurePtr& s,
                                                  const std::function<PAdicNumber(const PAdicNumber&)>& phi) const {
    TruncatedSeries r = *this;
    r.s_ = s;
    for (auto& x : r.c_) x = phi(x);
    return r;
}

TruncatedSeries TruncatedSeries::derivative(int var) const {
    require(var >= 0 && var < n_, ErrorCode::invalid_argument, "variable index out of range");
    TruncatedSeries r(s_, n_, D_);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        const Exponent& e = idx_->exponent(i);
        if (e[var] == 0 || c_[i].is_zero()) continue;
        Exponent d = e;
        --d[var];
        r.set(d, c_[i].mul_int(e[var]));
    }
    r.exact_ = exact_;
    if (!exact_) {
        // The degree-D coefficients of the derivative come from the omitted tail.
        r.tail_ = tail_;
        for (std::size_t i = idx_->count_up_to(D_ - 1); i < r.c_.size(); ++i)
            r.c_[i] = r.c_[i].with_precision(std::min(r.c_[i].precision_digits(), digits_of(tail_, s_->e())));
    }
    return r;
}

TruncatedSeries TruncatedSeries::integrate() const {
    require(n_ == 1, ErrorCode::invalid_argument, "integration is defined for single-variable series");
    TruncatedSeries r(s_, 1, D_);
    bool dropped = false;
    for (int k = 0; k <= D_; ++k) {
        if (c_[k].is_zero()) continue;
        if (k + 1 > D_) {
            dropped = true;
            continue;
        }
        r.c_[k + 1] = c_[k] / PAdicNumber::from_int(s_, k + 1);
    }
    r.exact_ = exact_ && !dropped;
    if (!r.exact_) r.tail_ = r.min_valuation();
    return r;
}

std::optional<Exponent> TruncatedSeries::first_difference(const TruncatedSeries& o) const {
    require(n_ == o.n_, ErrorCode::invalid_argument, "series variable count mismatch");
    const int D = std::min(D_, o.D_);
    const TruncatedSeries a = with_cap_unchecked(D), b = o.with_cap_unchecked(D);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        if (!a.c_[i].equals(b.c_[i].embed(a.s_))) return a.idx_->exponent(i);
    return std::nullopt;
}

TruncatedSeries TruncatedSeries::with_cap_unchecked(int D) const {
    if (D >= D_) return *this;
    TruncatedSeries r(s_, n_, D);
    for (std::size_t i = 0; i < r.c_.size(); ++i) r.c_[i] = c_[i];
    r.exact_ = false;
    r.tail_ = tail_;
    return r;
}

namespace {

std::string coefficient_display(const PAdicNumber& x) {
    const StructurePtr& s = x.structure();
    if (s->degree() > 1) return x.to_string();
    // Balanced representative.
    const int k = x.denominator_exponent();
    const int m = k + x.precision_digits();
    Int c = x.coefficients()[0];
    if (m > 0) {
        const Int& mod = s->p_power(m);
        if (2 * c > mod) c -= mod;
    }
    std::string out = c.get_str();
    if (k > 0) out += "/" + s->p_power(k).get_str();
    return out;
}

}  // namespace

std::string TruncatedSeries::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        os << coefficient_display(c_[i]);
        const Exponent& e = idx_->exponent(i);
        for (int k = 0; k < n_; ++k) {
            if (e[k] == 0) continue;
            os << "*X" << (k + 1);
            if (e[k] > 1) os << "^" << e[k];
        }
    }
    if (first) os << "0";
    if (!exact_) os << " + O(deg " << (D_ + 1) << ")";
    return os.str();
}

// ---------------------------------------------------------------------------
// Composition, reversion, evaluation

namespace {

void check_inner(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g) {
    require(static_cast<int>(g.size()) == f.variables(), ErrorCode::invalid_argument,
            "composition needs one inner series per variable");
    require(!g.empty(), ErrorCode::invalid_argument, "empty composition");
    for (const auto& x : g) {
        require(x.variables() == g[0].variables() && x.cap() == g[0].cap(), ErrorCode::invalid_argument,
                "inner series shape mismatch");
        require(x.structure()->same_field(*g[0].structure()), ErrorCode::invalid_argument,
                "inner series structure mismatch");
    }
}

// Sum of f_J * prod_k g_k^{J_k}, building monomial products layer by layer.
TruncatedSeries substitute(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g, bool stop_at_cap) {
    const StructurePtr& T = g[0].structure();
    const int D = g[0].cap();
    const MonomialIndex& I = f.index();
    TruncatedSeries acc(T, g[0].variables(), D);
    acc.set(0, f.coeff(0).embed(T));
    std::vector<TruncatedSeries> prev{TruncatedSeries::constant(T, g[0].variables(), D, PAdicNumber::one(T))};
    std::size_t prev_begin = 0;
    for (int d = 1; d <= f.cap(); ++d) {
        if (stop_at_cap && d > D) break;
        const std::size_t begin = I.count_up_to(d - 1), end = I.count_up_to(d);
        // Skip layers when no monomial at this degree or above has a coefficient.
        bool any = false;
        for (std::size_t i = begin; i < f.size() && !any; ++i) any = !f.coeff(i).is_zero();
        if (!any) break;
        std::vector<TruncatedSeries> cur;
        cur.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            const TruncatedSeries& par = prev[I.parent(i) - prev_begin];
            cur.push_back(par * g[I.pivot(i)]);
            if (!f.coeff(i).is_zero()) acc = acc + cur.back().scale(f.coeff(i));
        }
        prev = std::move(cur);
        prev_begin = begin;
    }
    return acc;
}

}  // namespace

TruncatedSeries compose(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g) {
    check_inner(f, g);
    for (const auto& x : g)
        require(x.constant_term().is_zero(), ErrorCode::precondition, "inner series has a nonzero constant term");
    const int D = g[0].cap();
    require(f.cap() >= D || f.exact(), ErrorCode::precondition, "outer series is truncated below the inner cap");
    TruncatedSeries r = substitute(f, g, true);
    bool all_exact = f.exact();
    int inner_deg = 0;
    RationalValuation gfloor = RationalValuation(0);
    for (const auto& x : g) {
        all_exact = all_exact && x.exact();
        inner_deg = std::max(inner_deg, max_degree(x));
        gfloor = min(gfloor, x.coefficient_floor());
    }
    const int fdeg = max_degree(f);
    if (all_exact && fdeg * inner_deg <= D) {
        r.set_exact();
    } else {
        RationalValuation t = f.coefficient_floor();
        if (gfloor < RationalValuation(0)) t = t + times(gfloor, D + 1);
        r.set_tail(t);
    }
    return r;
}

TruncatedSeries compose_shifted(const TruncatedSeries& f, const std::vector<TruncatedSeries>& g) {
    check_inner(f, g);
    const StructurePtr& T = g[0].structure();
    RationalValuation cmin = RationalValuation::infinity();
    for (const auto& x : g) {
        const PAdicNumber c = x.constant_term();
        if (!c.is_zero()) cmin = min(cmin, c.valuation());
    }
    if (!f.exact())
        require(cmin > RationalValuation(0), ErrorCode::domain,
                "constant terms need positive valuation when the outer series is truncated");
    TruncatedSeries r = substitute(f, g, false);
    bool all_exact = f.exact();
    for (const auto& x : g) all_exact = all_exact && x.exact();
    int fdeg = max_degree(f), inner_deg = 0;
    for (const auto& x : g) inner_deg = std::max(inner_deg, max_degree(x));
    if (!f.exact()) {
        // Omitted terms of f (degree > D) contribute at valuation >= tail + (D+1) * v(c).
        const RationalValuation bound = f.tail_bound() + times(cmin, f.cap() + 1);
        if (!bound.is_infinite()) {
            const int digits = digits_of(bound, T->e());
            r = r.with_precision(digits);
        }
        r.set_tail(f.coefficient_floor());
    } else if (all_exact && fdeg * inner_deg <= r.cap()) {
        r.set_exact();
    } else {
        r.set_tail(min(f.coefficient_floor(), RationalValuation(0)));
    }
    return r;
}

TruncatedSeries reversion(const TruncatedSeries& f) {
    require(f.variables() == 1, ErrorCode::invalid_argument, "reversion needs a single-variable series");
    require(f.coeff(0).is_zero(), ErrorCode::precondition, "reversion needs zero constant term");
    require(f.cap() >= 1 && f.coeff(1).is_unit(), ErrorCode::precondition,
            "reversion needs a unit linear coefficient");
    const StructurePtr& s = f.structure();
    const int D = f.cap();
    const PAdicNumber a1inv = f.coeff(1).inverse();
    const TruncatedSeries X = TruncatedSeries::variable(s, 1, D, 0);
    TruncatedSeries g = X.scale(a1inv);
    for (int k = 2; k <= D; ++k) {
        TruncatedSeries err = compose(f, {g}) - X;
        if (err.is_zero()) break;
        g = g - err.scale(a1inv);
    }
    const bool trivial = f.exact() && max_degree(f) <= 1;
    if (trivial)
        g.set_exact();
    else
        g.set_tail(min(RationalValuation(0), g.min_valuation()));
    return g;
}

RationalValuation Evaluation::certified_valuation() const {
    const RationalValuation v = value.is_zero() ? RationalValuation::infinity() : value.valuation();
    return min(v, tail_bound);
}

Evaluation evaluate(const TruncatedSeries& f, const std::vector<PAdicNumber>& point) {
    require(static_cast<int>(point.size()) == f.variables(), ErrorCode::invalid_argument,
            "point dimension does not match the series");
    const StructurePtr& T = point[0].structure();
    std::vector<PAdicNumber> P;
    RationalValuation vmin = RationalValuation::infinity();
    const bool integral = f.integral();
    for (const auto& x : point) {
        PAdicNumber y = x.embed(T);
        const RationalValuation v = y.is_zero() ? RationalValuation::infinity() : y.valuation();
        if (integral && f.exact())
            ;
        else if (integral)
            require(v >= RationalValuation(0), ErrorCode::domain, "coordinate outside the closed unit disk");
        else
            require(v > RationalValuation(0), ErrorCode::domain,
                    "coordinate of valuation <= 0 against a non-integral series");
        vmin = min(vmin, v);
        P.push_back(std::move(y));
    }
    const MonomialIndex& I = f.index();
    const int maxd = max_degree(f);
    std::vector<PAdicNumber> mono;
    mono.reserve(I.count_up_to(maxd));
    mono.push_back(PAdicNumber::one(T));
    PAdicNumber acc = f.coeff(0).embed(T);
    for (std::size_t i = 1; i < I.count_up_to(maxd); ++i) {
        mono.push_back(mono[I.parent(i)] * P[I.pivot(i)]);
        if (!f.coeff(i).is_zero()) acc = acc + f.coeff(i).embed(T) * mono.back();
    }
    Evaluation ev{acc, RationalValuation::infinity()};
    if (!f.exact()) ev.tail_bound = f.tail_bound() + times(vmin, f.cap() + 1);
    return ev;
}

// ---------------------------------------------------------------------------
// Weierstrass preparation

namespace {

// g = alpha(g) X_v^nu + beta(g), beta of X_v-degree < nu.
TruncatedSeries alpha_part(const TruncatedSeries& g, int var, int nu) {
    TruncatedSeries r(g.structure(), g.variables(), g.cap());
    const MonomialIndex& I = g.index();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Exponent& e = I.exponent(i);
        if (e[var] < nu || g.coeff(i).is_zero()) continue;
        Exponent d = e;
        d[var] -= nu;
        r.set(d, g.coeff(i));
    }
    return r;
}

TruncatedSeries beta_part(const TruncatedSeries& g, int var, int nu) {
    TruncatedSeries r(g.structure(), g.variables(), g.cap());
    const MonomialIndex& I = g.index();
    for (std::size_t i = 0; i < g.size(); ++i)
        if (I.exponent(i)[var] < nu) r.set(i, g.coeff(i));
    return r;
}

}  // namespace

TruncatedSeries multiplicative_inverse(const TruncatedSeries& u) {
    require(u.constant_term().is_unit(), ErrorCode::domain, "series with non-unit constant term is not invertible");
    const StructurePtr& s = u.structure();
    const int n = u.variables(), D = u.cap();
    TruncatedSeries w = TruncatedSeries::constant(s, n, D, u.constant_term().inverse());
    const TruncatedSeries two = TruncatedSeries::constant(s, n, D, PAdicNumber::from_int(s, 2));
    for (int it = 0, lim = 2 * (D + s->cap_digits()) + 4; it < lim; ++it) {
        TruncatedSeries next = w * (two - u * w);
        if (next.equals(w)) return next;
        w = std::move(next);
    }
    fail(ErrorCode::budget, "series inverse did not stabilize");
}

WeierstrassData weierstrass_prepare(const TruncatedSeries& f_in, int var) {
    require(var >= 0 && var < f_in.variables(), ErrorCode::invalid_argument, "variable index out of range");
    const StructurePtr& s = f_in.structure();
    const int n = f_in.variables(), D = f_in.cap();
    // nu: first unit coefficient of f(0,..,X_var,..,0).
    int nu = -1;
    for (int j = 0; j <= D; ++j) {
        Exponent e(n, 0);
        e[var] = j;
        const PAdicNumber c = f_in.coeff(e);
        if (c.is_zero()) {
            require(c.precision_digits() > 0, ErrorCode::precision, "precision insufficient to certify the degree");
            continue;
        }
        if (c.is_unit()) {
            nu = j;
            break;
        }
    }
    require(nu >= 0, ErrorCode::precondition, "series is not distinguished in the chosen variable");
    const int work_cap = f_in.exact() ? D + nu : D;
    const TruncatedSeries f = f_in.with_cap(work_cap);
    const TruncatedSeries a = alpha_part(f, var, nu);
    const TruncatedSeries b = beta_part(f, var, nu);
    const TruncatedSeries ainv = multiplicative_inverse(a);
    const TruncatedSeries one = TruncatedSeries::constant(s, n, work_cap, PAdicNumber::one(s));
    TruncatedSeries q = ainv;
    bool stable = false;
    for (int it = 0, lim = s->cap_digits() + work_cap + 4; it < lim; ++it) {
        TruncatedSeries next = ainv * (one - alpha_part(q * b, var, nu));
        if (next.equals(q)) {
            stable = true;
            q = std::move(next);
            break;
        }
        q = std::move(next);
    }
    require(stable, ErrorCode::budget, "Weierstrass iteration did not stabilize");
    WeierstrassData out;
    out.degree = nu;
    out.variable = var;
    TruncatedSeries dp = beta_part(q * f, var, nu);
    {
        Exponent e(n, 0);
        e[var] = nu;
        dp.set(e, PAdicNumber::one(s));
    }
    out.unit = multiplicative_inverse(q).with_cap(D);
    out.dpoly = dp.with_cap(D);
    if (f_in.exact()) {
        // Exactness of the results is not claimed beyond degree D.
        out.unit.set_tail(RationalValuation(0));
        if (dp.with_cap(D).exact())
            out.dpoly.set_exact();
    }
    for (int j = 0; j <= nu; ++j) {
        TruncatedSeries cj(s, n, D);
        const MonomialIndex& I = out.dpoly.index();
        for (std::size_t i = 0; i < out.dpoly.size(); ++i) {
            const Exponent& e = I.exponent(i);
            if (e[var] != j) continue;
            Exponent d = e;
            d[var] = 0;
            cj.set(d, out.dpoly.coeff(i));
        }
        out.coefficients.push_back(std::move(cj));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

char digit_char(long d) { return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10)); }

int digit_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'z') return c - 'a' + 10;
    return -1;
}

std::string join_ints(const std::vector<Int>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + v[i].get_str();
    return out;
}

std::vector<Int> split_ints(const std::string& text) {
    std::vector<Int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        Int v;
        require(v.set_str(item, 10) == 0, ErrorCode::parse, "bad integer '" + item + "'");
        out.push_back(v);
    }
    return out;
}

std::string trim_copy(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string coefficient_to_text(const PAdicNumber& x) {
    const StructurePtr& s = x.structure();
    require(s->prime() <= 36, ErrorCode::invalid_argument, "text format supports p <= 36");
    const int E = s->e(), F = s->f();
    const int k = x.denominator_exponent(), prec = x.precision_digits();
    bool need_prec = E > 1;
    std::string out;
    for (int i = 0; i < E; ++i) {
        const int m = k + static_cast<int>(prec - i >= 0 ? (prec - i + E - 1) / E : -((i - prec) / E));
        if (m <= k) need_prec = true;
        for (int j = 0; j < F; ++j) {
            if (i || j) out += '|';
            Int c = x.coefficients()[i * F + j];
            const int ndig = std::max(m, k);
            for (int d = 0; d < ndig; ++d) {
                if (d == k && k > 0) out += '.';
                Int r;
                mpz_fdiv_qr_ui(c.get_mpz_t(), r.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(s->prime()));
                out += digit_char(r.get_si());
            }
            if (ndig == k && k > 0) out += '.';
        }
    }
    if (need_prec) out += "@" + std::to_string(prec);
    return out;
}

PAdicNumber coefficient_from_text(const StructurePtr& s, const std::string& raw) {
    const std::string text = trim_copy(raw);
    if (text.rfind("q:", 0) == 0) {
        const std::string q = text.substr(2);
        const auto slash = q.find('/');
        Int num, den = 1;
        require(num.set_str(trim_copy(q.substr(0, slash)), 10) == 0, ErrorCode::parse, "bad rational '" + q + "'");
        if (slash != std::string::npos)
            require(den.set_str(trim_copy(q.substr(slash + 1)), 10) == 0 && den != 0, ErrorCode::parse,
                    "bad rational '" + q + "'");
        return PAdicNumber::from_rational(s, num, den);
    }
    const int E = s->e(), F = s->f();
    std::string body = text;
    int prec = 0;
    bool have_prec = false;
    if (const auto at = body.find('@'); at != std::string::npos) {
        try {
            std::size_t used = 0;
            prec = std::stoi(body.substr(at + 1), &used);
            require(used == body.size() - at - 1, ErrorCode::parse, "bad precision in '" + text + "'");
        } catch (const std::logic_error&) {
            fail(ErrorCode::parse, "bad precision in '" + text + "'");
        }
        have_prec = true;
        body = body.substr(0, at);
    }
    std::vector<std::string> comps;
    {
        std::stringstream ss(body);
        std::string item;
        while (std::getline(ss, item, '|')) comps.push_back(item);
        if (!body.empty() && body.back() == '|') comps.push_back("");
        if (body.empty()) comps.push_back("");
    }
    require(static_cast<int>(comps.size()) == E * F, ErrorCode::parse,
            "coefficient '" + text + "' has the wrong number of components");
    int k = -1;
    std::vector<Int> c;
    int ndig0 = 0;
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
        const std::string& d = comps[ci];
        const auto dot = d.find('.');
        const int kk = dot == std::string::npos ? 0 : static_cast<int>(dot);
        require(k < 0 || k == kk, ErrorCode::parse, "inconsistent fractional digits in '" + text + "'");
        k = kk;
        Int v = 0, place = 1;
        int nd = 0;
        for (char ch : d) {
            if (ch == '.') continue;
            const int dv = digit_value(ch);
            require(dv >= 0 && dv < s->prime(), ErrorCode::parse, "bad digit in '" + text + "'");
            v += place * dv;
            place *= s->prime();
            ++nd;
        }
        if (ci == 0) ndig0 = nd;
        c.push_back(v);
    }
    if (!have_prec) {
        require(E == 1, ErrorCode::parse, "coefficient '" + text + "' needs an explicit precision");
        prec = ndig0 - k;
    }
    return PAdicNumber::from_coefficients(s, std::move(c), k, prec);
}

std::string series_to_text(const TruncatedSeries& f) {
    const StructurePtr& s = f.structure();
    std::ostringstream os;
    os << "padmm-series 1 p=" << s->prime() << " N=" << s->precision() << " n=" << f.variables() << " D=" << f.cap();
    if (s->f() > 1) os << " unram=" << join_ints(s->unramified_poly());
    if (s->e() > 1) os << " eis=" << join_ints(s->eisenstein_poly());
    os << " prec=" << s->cap_digits() << " exact=" << (f.exact() ? 1 : 0)
       << " tail=" << (f.exact() ? std::string("inf") : f.tail_bound().to_string()) << "\n";
    const MonomialIndex& I = f.index();
    for (std::size_t i = 0; i < f.size(); ++i) {
        const PAdicNumber& c = f.coeff(i);
        if (c.is_zero() && c.precision_digits() == s->cap_digits()) continue;
        const Exponent& e = I.exponent(i);
        for (int k = 0; k < f.variables(); ++k) os << (k ? "," : "") << e[k];
        os << " : " << coefficient_to_text(c) << "\n";
    }
    return os.str();
}

TruncatedSeries series_from_terms(const StructurePtr& s, int n, int D, const std::string& text) {
    TruncatedSeries f(s, n, D);
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::string t = trim_copy(line);
        if (t.empty() || t[0] == '#') continue;
        const auto colon = t.find(':');
        require(colon != std::string::npos, ErrorCode::parse,
                "line " + std::to_string(lineno) + ": expected 'J1,...,Jn : coefficient'");
        Exponent e;
        {
            std::stringstream es(t.substr(0, colon));
            std::string item;
            while (std::getline(es, item, ',')) {
                try {
                    std::size_t used = 0;
                    const std::string it = trim_copy(item);
                    e.push_back(std::stoi(it, &used));
                    require(used == it.size() && e.back() >= 0, ErrorCode::parse, "bad exponent");
                } catch (const std::logic_error&) {
                    fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": bad exponent '" + item + "'");
                }
            }
        }
        require(static_cast<int>(e.size()) == n, ErrorCode::parse,
                "line " + std::to_string(lineno) + ": expected " + std::to_string(n) + " exponents");
        const std::size_t idx = f.index().rank(e);
        require(idx != MonomialIndex::npos, ErrorCode::parse,
                "line " + std::to_string(lineno) + ": term exceeds the degree cap");
        try {
            f.set(idx, f.coeff(idx) + coefficient_from_text(s, t.substr(colon + 1)));
        } catch (const Error& err) {
            fail(ErrorCode::parse, "line " + std::to_string(lineno) + ": " + err.what());
        }
    }
    return f;
}

TruncatedSeries series_from_text(const std::string& text) {
    const auto nl = text.find('\n');
    const std::string header = trim_copy(text.substr(0, nl));
    std::stringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    require(magic == "padmm-series" && version == "1", ErrorCode::parse, "missing series header");
    std::map<std::string, std::string> kv;
    std::string tok;
    while (hs >> tok) {
        const auto eq = tok.find('=');
        require(eq != std::string::npos, ErrorCode::parse, "bad header token '" + tok + "'");
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    auto geti = [&](const std::string& key) {
        require(kv.count(key) > 0, ErrorCode::parse, "header is missing '" + key + "'");
        try {
            return std::stoi(kv[key]);
        } catch (const std::logic_error&) {
            fail(ErrorCode::parse, "bad header value for '" + key + "'");
        }
    };
    StructurePtr s = Structure::rationals(geti("p"), geti("N"));
    if (kv.count("unram")) s = extend_field(s, split_ints(kv["unram"]), TowerStep::Kind::unramified);
    if (kv.count("eis")) s = extend_field(s, split_ints(kv["eis"]), TowerStep::Kind::eisenstein);
    const int n = geti("n"), D = geti("D");
    TruncatedSeries f = series_from_terms(s, n, D, nl == std::string::npos ? "" : text.substr(nl + 1));
    if (kv.count("exact") && kv["exact"] == "0") f.set_tail(RationalValuation::parse(kv.count("tail") ? kv["tail"] : "0"));
    return f;
}

}  // namespace padmm
