#include "padmm/torsion.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <tuple>

namespace padmm {

namespace {

using IntPoly = std::vector<Int>;

void trim(IntPoly& a) {
    while (a.size() > 1 && a.back() == 0) a.pop_back();
}

IntPoly int_mul(const IntPoly& a, const IntPoly& b) {
    IntPoly c(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0)
            for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    trim(c);
    return c;
}

// g(h(X)) by Horner.
IntPoly int_compose(const IntPoly& g, const IntPoly& h) {
    IntPoly acc{g.back()};
    for (std::size_t i = g.size() - 1; i-- > 0;) {
        acc = int_mul(acc, h);
        acc[0] += g[i];
    }
    trim(acc);
    return acc;
}

// Exact quotient a / b for monic b.
IntPoly int_divexact(IntPoly a, const IntPoly& b) {
    require(b.back() == 1, ErrorCode::precondition, "division polynomial must be monic");
    const std::size_t db = b.size() - 1;
    if (a.size() - 1 < db) fail(ErrorCode::internal_assertion, "polynomial division by a larger degree");
    IntPoly q(a.size() - db, 0);
    for (std::size_t k = q.size(); k-- > 0;) {
        q[k] = a[k + db];
        for (std::size_t j = 0; j <= db; ++j) a[k + j] -= q[k] * b[j];
    }
    for (const auto& c : a)
        if (c != 0) fail(ErrorCode::internal_assertion, "iterated division polynomials do not divide");
    return q;
}

Int ipow(long p, int k) {
    Int r = 1;
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

std::int64_t small(const Int& v) {
    require(v.fits_slong_p(), ErrorCode::budget, "multiplier too large");
    return v.get_si();
}

// Division polynomial of a one-dimensional law: exact when known, otherwise an
// integer approximation of the distinguished polynomial of [p]. The second
// member is the absolute p-adic precision of the approximation (-1 if exact).
struct DivisionData {
    IntPoly g;
    int precision = -1;
};

DivisionData division_data(const FormalGroupLaw& G) {
    if (G.division_polynomial()) {
        IntPoly g = *G.division_polynomial();
        trim(g);
        require(g.back() == 1, ErrorCode::precondition,
                "torsion towers need a monic division polynomial for " + G.describe());
        return {g, -1};
    }
    const StructurePtr& s = G.structure();
    require(s->degree() == 1, ErrorCode::precondition,
            "torsion of laws without an exact division polynomial is only supported over Q_p");
    const WeierstrassData w = weierstrass_prepare(G.mult_by(s->prime()), 0);
    DivisionData d;
    d.precision = s->cap_digits();
    for (int k = 0; k <= w.degree; ++k) {
        const PAdicNumber c = k < w.degree ? w.coefficients.at(k).coeff(0) : PAdicNumber::one(s);
        require(c.lies_in_base() && c.denominator_exponent() == 0, ErrorCode::domain,
                "division polynomial of " + G.describe() + " is not integral");
        Int v = c.base_numerator();
        const int m = c.precision_digits();
        if (m > 0 && 2 * v > s->p_power(std::min(m, s->cap_digits()))) v -= s->p_power(std::min(m, s->cap_digits()));
        d.g.push_back(v);
        if (k < w.degree) d.precision = std::min(d.precision, m);
    }
    trim(d.g);
    return d;
}

std::string tower_key(const StructurePtr& s, const IntPoly& g) {
    std::ostringstream os;
    os << s->describe() << '/' << s->precision() << '/' << s->guard() << ':';
    for (const auto& c : g) os << c.get_str() << ',';
    return os.str();
}

// Torsion of a one-dimensional law placed in a tower: points with their levels.
struct FactorPoints {
    std::vector<std::pair<PAdicNumber, int>> pts;
};

std::recursive_mutex g_mu;
std::map<std::string, TorsionTowerPtr> g_towers;
std::map<std::tuple<const void*, const void*, int>, std::shared_ptr<const FactorPoints>> g_factor;
std::map<std::pair<const void*, int>, std::shared_ptr<const TorsionTable>> g_tables;
std::vector<FormalGroupPtr> g_pinned;  // keeps cache keys unique

TorsionTowerPtr tower_for(const StructurePtr& s, const IntPoly& g) {
    const std::string key = tower_key(s, g);
    auto it = g_towers.find(key);
    if (it != g_towers.end()) return it->second;
    auto t = std::make_shared<const TorsionTower>(s, g);
    g_towers.emplace(key, t);
    return t;
}

// Base of the torsion tower of `lead`. For laws of height h >= 2 known only
// through their series, F[p] needs the unramified extension of degree h.
StructurePtr tower_base(const FormalGroupLaw& lead) {
    const StructurePtr& s = lead.structure();
    if (lead.division_polynomial() || s->f() != 1) return s;
    const HeightResult h = lead.height();
    if (!h.finite || h.height < 2) return s;
    return extend_field(s, smallest_irreducible_mod_p(s->prime(), h.height), TowerStep::Kind::unramified);
}

std::shared_ptr<const FactorPoints> factor_points(const FormalGroupPtr& G, const TorsionTowerPtr& T, int r) {
    const auto key = std::make_tuple(static_cast<const void*>(G.get()), static_cast<const void*>(T.get()), r);
    auto it = g_factor.find(key);
    if (it != g_factor.end()) return it->second;
    auto out = std::make_shared<FactorPoints>();
    const StructurePtr K = T->field(r);
    if (r == 0 || G->kind() == GroupKind::additive) {
        out->pts.push_back({PAdicNumber::zero(K), 0});
    } else {
        const DivisionData dd = division_data(*G);
        require(dd.precision < 0 || r <= 1, ErrorCode::precondition,
                "torsion of level >= 2 needs an exact division polynomial (" + G->describe() + ")");
        const std::size_t d = dd.g.size() - 1;
        long total = 1;
        for (int i = 0; i < r; ++i) {
            total *= static_cast<long>(d);
            require(total <= kTorsionBudget, ErrorCode::budget,
                    "torsion of level " + std::to_string(r) + " exceeds the point budget");
        }
        const auto prev = factor_points(G, T, r - 1);
        const PolyK gK = poly_from_ints(K, dd.g);
        const PolyK dg = poly_derivative(gK);
        for (const auto& [q, lvl] : prev->pts) {
            const PAdicNumber Q = T->map(q, r - 1, r);
            out->pts.push_back({Q, lvl});
            if (lvl != r - 1) continue;
            PolyK h = gK;
            h[0] = h[0] - Q;
            std::size_t found = 0;
            for (PAdicNumber x : integral_roots(h)) {
                if (x.is_zero()) continue;
                if (dd.precision >= 0) {
                    // Roots of the approximate polynomial move by at most
                    // (precision - v(g'(x))) under the coefficient error.
                    const std::int64_t dv = poly_eval(dg, x).valuation_digits();
                    const std::int64_t lim = static_cast<std::int64_t>(K->e()) * dd.precision - dv;
                    x = x.with_precision(static_cast<int>(std::max<std::int64_t>(1, lim)));
                }
                out->pts.push_back({x, r});
                ++found;
            }
            const std::size_t expect = lvl == 0 ? d - 1 : d;
            require(found == expect, ErrorCode::domain,
                    "torsion of " + G->describe() + " at level " + std::to_string(r) +
                        " is not rational over " + K->describe() + " (found " + std::to_string(found) + " of " +
                        std::to_string(expect) + " points); composita are not supported");
        }
    }
    g_pinned.push_back(G);
    g_factor.emplace(key, out);
    return out;
}

TorsionPoint snapped(const TorsionTable& table, const FormalGroupLaw::PointValue& v) {
    return table.snap(v.coords, v.tail_bound);
}

}  // namespace

// ---------------------------------------------------------------------------

bool TorsionPoint::is_zero() const {
    for (const auto& c : coords)
        if (!c.is_zero()) return false;
    return true;
}

std::string TorsionPoint::key() const {
    std::string k;
    for (std::size_t i = 0; i < coords.size(); ++i) k += (i ? "|" : "") + coords[i].key();
    return k;
}

bool TorsionPoint::operator==(const TorsionPoint& o) const {
    if (coords.size() != o.coords.size()) return false;
    for (std::size_t i = 0; i < coords.size(); ++i)
        if (!coords[i].equals(o.coords[i])) return false;
    return true;
}

// ---------------------------------------------------------------------------

TorsionTower::TorsionTower(StructurePtr base, std::vector<Int> division_polynomial)
    : base_(std::move(base)), g_(std::move(division_polynomial)) {
    trim(g_);
    require(g_.size() >= 3 && g_[0] == 0, ErrorCode::invalid_argument,
            "division polynomial must vanish at 0 and have degree >= 2");
    require(g_.back() == 1, ErrorCode::precondition, "division polynomial must be monic");
    fields_.push_back(base_);
    gamma_.emplace_back();
    iterates_.push_back({0, 1});
}

void TorsionTower::ensure(int r) const {
    require(r >= 0, ErrorCode::invalid_argument, "negative torsion level");
    for (int k = static_cast<int>(fields_.size()); k <= r; ++k) {
        IntPoly it = int_compose(g_, iterates_[k - 1]);
        const IntPoly h = int_divexact(it, iterates_[k - 1]);
        StructurePtr K;
        PAdicNumber gamma;
        if (h.size() == 2) {
            require(k == 1, ErrorCode::internal_assertion, "degenerate torsion tower");
            K = base_;
        } else {
            K = extend_field(base_, h, TowerStep::Kind::eisenstein);
            if (fields_[k - 1] != base_)
                gamma = poly_eval(poly_from_ints(K, g_), PAdicNumber::uniformizer(K));
        }
        fields_.push_back(K);
        gamma_.push_back(gamma);
        iterates_.push_back(std::move(it));
    }
}

StructurePtr TorsionTower::field(int r) const {
    std::lock_guard lk(mu_);
    ensure(r);
    return fields_[r];
}

int TorsionTower::level_of(const StructurePtr& s) const {
    std::lock_guard lk(mu_);
    for (std::size_t k = fields_.size(); k-- > 0;)
        if (fields_[k] == s) return static_cast<int>(k);
    return -1;
}

PAdicNumber TorsionTower::map(const PAdicNumber& x, int from_level, int to_level) const {
    require(from_level <= to_level, ErrorCode::invalid_argument, "tower maps go upward only");
    PAdicNumber y = x;
    for (int a = from_level; a < to_level; ++a) {
        StructurePtr Ka, Kb;
        PAdicNumber gamma;
        {
            std::lock_guard lk(mu_);
            ensure(a + 1);
            Ka = fields_[a];
            Kb = fields_[a + 1];
            gamma = gamma_[a + 1];
        }
        if (Ka == Kb) continue;
        if (Ka == base_) {
            y = y.embed(Kb);
            continue;
        }
        // pi_a -> gamma, t -> t.
        const int f = Ka->f(), ea = Ka->e(), eb = Kb->e();
        const std::vector<Int>& c = y.coefficients();
        PAdicNumber acc = PAdicNumber::zero(Kb), gp = PAdicNumber::one(Kb);
        for (int i = 0; i < ea; ++i) {
            std::vector<Int> row(Kb->degree(), 0);
            bool nz = false;
            for (int j = 0; j < f; ++j) {
                row[j] = c[i * f + j];
                nz = nz || row[j] != 0;
            }
            if (nz) acc += PAdicNumber::from_coefficients(Kb, row, 0, Kb->cap_digits()) * gp;
            if (i + 1 < ea) gp = gp * gamma;
        }
        if (y.denominator_exponent() > 0)
            acc = acc * PAdicNumber::from_rational(Kb, 1, ipow(Kb->prime(), y.denominator_exponent()));
        const std::int64_t prec = static_cast<std::int64_t>(y.precision_digits()) * (eb / ea);
        y = acc.with_precision(static_cast<int>(std::min<std::int64_t>(prec, Kb->cap_digits())));
    }
    return y;
}

// ---------------------------------------------------------------------------

std::vector<TorsionPoint> TorsionTable::exact_level(int r) const {
    std::vector<TorsionPoint> out;
    for (const auto& P : points)
        if (P.level == r) out.push_back(P);
    return out;
}

namespace {

std::string truncated_key(const std::vector<PAdicNumber>& coords, const std::vector<int>& digits) {
    std::string k;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        const PAdicNumber& x = coords[i];
        require(x.precision_digits() >= digits[i], ErrorCode::precision, "torsion coordinate below key precision");
        k += (i ? "|" : "") + x.with_precision(digits[i]).key();
    }
    return k;
}

}  // namespace

std::size_t TorsionTable::locate(const std::vector<PAdicNumber>& approx, const RationalValuation& tail_bound) const {
    require(approx.size() == separation.size(), ErrorCode::invalid_argument, "point dimension mismatch");
    std::vector<PAdicNumber> A;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        A.push_back(approx[i].embed(field));
        const RationalValuation cert = min(tail_bound, A.back().precision());
        require(cert > separation[i], ErrorCode::precision,
                "certified precision " + cert.to_string() + " cannot separate torsion points (need > " +
                    separation[i].to_string() + ")");
    }
    auto it = lookup.find(truncated_key(A, key_digits));
    require(it != lookup.end(), ErrorCode::internal_assertion, "value is not near any torsion point of the table");
    const TorsionPoint& P = points[it->second];
    for (std::size_t i = 0; i < A.size(); ++i) {
        const PAdicNumber d = A[i] - P.coords[i];
        require(d.is_zero() || d.valuation() > separation[i], ErrorCode::internal_assertion,
                "torsion lookup returned a distant point");
    }
    return it->second;
}

const TorsionPoint& TorsionTable::snap(const std::vector<PAdicNumber>& approx,
                                       const RationalValuation& tail_bound) const {
    return points[locate(approx, tail_bound)];
}

std::size_t TorsionTable::index_of(const TorsionPoint& P) const {
    auto it = lookup.find(truncated_key(P.coords, key_digits));
    require(it != lookup.end() && points[it->second] == P, ErrorCode::invalid_argument,
            "point is not in the torsion table");
    return it->second;
}

const TorsionPoint& TorsionTable::find(const TorsionPoint& P) const { return points[index_of(P)]; }

TorsionPoint TorsionTable::lift(const TorsionPoint& P, const TorsionTable& higher) const {
    require(tower == higher.tower, ErrorCode::invalid_argument, "tables live in different towers");
    TorsionPoint Q;
    Q.level = P.level;
    for (const auto& c : P.coords)
        Q.coords.push_back(tower ? tower->map(c, field_level, higher.field_level) : c);
    return higher.find(Q);
}

std::shared_ptr<const TorsionTable> division_points(const FormalGroupPtr& F, int r) {
    require(F != nullptr, ErrorCode::invalid_argument, "null group");
    require(r >= 0, ErrorCode::invalid_argument, "torsion level must be >= 0");
    std::lock_guard lk(g_mu);
    const auto key = std::make_pair(static_cast<const void*>(F.get()), r);
    auto it = g_tables.find(key);
    if (it != g_tables.end()) return it->second;

    const auto& factors = F->factors();
    FormalGroupPtr lead;
    for (const auto& G : factors)
        if (G->kind() != GroupKind::additive) {
            lead = G;
            break;
        }
    auto table = std::make_shared<TorsionTable>();
    table->group = F;
    table->level = r;
    std::vector<std::shared_ptr<const FactorPoints>> per;
    if (lead) {
        const DivisionData dd = division_data(*lead);
        table->tower = tower_for(tower_base(*lead), dd.g);
        table->field_level = r;
        table->field = table->tower->field(r);
        for (const auto& G : factors) per.push_back(factor_points(G, table->tower, r));
    } else {
        table->field = F->structure();
        for (std::size_t i = 0; i < factors.size(); ++i) {
            auto fp = std::make_shared<FactorPoints>();
            fp->pts.push_back({PAdicNumber::zero(table->field), 0});
            per.push_back(fp);
        }
    }
    long total = 1;
    for (const auto& fp : per) {
        total *= static_cast<long>(fp->pts.size());
        require(total <= kTorsionBudget * kTorsionBudget, ErrorCode::budget, "product torsion exceeds the budget");
    }
    for (const auto& fp : per) {
        RationalValuation sep(0);
        for (const auto& [x, lvl] : fp->pts)
            if (lvl > 0) sep = max(sep, x.valuation());
        table->separation.push_back(sep);
    }
    std::vector<std::size_t> idx(per.size(), 0);
    for (long n = 0; n < total; ++n) {
        TorsionPoint P;
        for (std::size_t i = 0; i < per.size(); ++i) {
            const auto& [x, lvl] = per[i]->pts[idx[i]];
            P.coords.push_back(x);
            P.level = std::max(P.level, lvl);
        }
        table->points.push_back(std::move(P));
        for (std::size_t i = per.size(); i-- > 0;) {
            if (++idx[i] < per[i]->pts.size()) break;
            idx[i] = 0;
        }
    }
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < table->points.size(); ++i) order.push_back({table->points[i].key(), i});
    std::vector<TorsionPoint> sorted;
    std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
        const int la = table->points[a.second].level, lb = table->points[b.second].level;
        return la != lb ? la < lb : a.first < b.first;
    });
    for (const auto& o : order) sorted.push_back(table->points[o.second]);
    table->points = std::move(sorted);
    const int e = table->field->e();
    for (const auto& sep : table->separation) table->key_digits.push_back(static_cast<int>(sep.floor_scaled(e)) + 1);
    for (std::size_t i = 0; i < table->points.size(); ++i) {
        const bool fresh = table->lookup.emplace(truncated_key(table->points[i].coords, table->key_digits), i).second;
        require(fresh, ErrorCode::internal_assertion, "two torsion points agree past the separation bound");
    }
    g_pinned.push_back(F);
    g_tables.emplace(key, table);
    return table;
}

// ---------------------------------------------------------------------------

PAdicNumber frobenius(const PAdicNumber& x, int k) {
    const StructurePtr& s = x.structure();
    const int f = s->f();
    if (f == 1) return x;
    const int kk = ((k % f) + f) % f;
    if (kk == 0) return x;
    const long p = s->prime();
    std::int64_t q = 1;
    for (int i = 0; i < kk; ++i) q *= p;
    const PAdicNumber t = PAdicNumber::unramified_generator(s);
    const PAdicNumber tk = hensel_root(poly_from_ints(s, s->unramified_poly()), t.pow(q));
    const int e = s->e();
    const std::vector<Int>& c = x.coefficients();
    PAdicNumber acc = PAdicNumber::zero(s), pi_i = PAdicNumber::one(s);
    const PAdicNumber pi = PAdicNumber::uniformizer(s);
    for (int i = 0; i < e; ++i) {
        PAdicNumber row = PAdicNumber::zero(s), tj = PAdicNumber::one(s);
        for (int j = 0; j < f; ++j) {
            if (c[i * f + j] != 0) row += PAdicNumber::from_int(s, c[i * f + j]) * tj;
            tj = tj * tk;
        }
        acc += row * pi_i;
        pi_i = pi_i * pi;
    }
    if (x.denominator_exponent() > 0) acc = acc * PAdicNumber::from_rational(s, 1, ipow(p, x.denominator_exponent()));
    return acc.with_precision(x.precision_digits());
}

TorsionPoint galois_orbit(const TorsionTable& table, const TorsionPoint& P, const GaloisElement& g) {
    const long p = table.field->prime();
    require(mpz_divisible_ui_p(g.u.get_mpz_t(), p) == 0, ErrorCode::domain,
            "sigma_u needs a unit u; got u = " + g.u.get_str());
    if (P.level == 0 && g.frobenius == 0) return table.find(P);
    const Int mod = ipow(p, std::max(P.level, 1));
    Int u = g.u % mod;
    if (u < 0) u += mod;
    auto v = table.group->multiply(small(u), P.coords);
    if (g.frobenius != 0)
        for (auto& c : v.coords) c = frobenius(c, g.frobenius);
    return snapped(table, v);
}

TorsionPoint torsion_add(const TorsionTable& table, const TorsionPoint& P, const TorsionPoint& Q) {
    return snapped(table, table.group->add(P.coords, Q.coords));
}

TorsionPoint torsion_sub(const TorsionTable& table, const TorsionPoint& P, const TorsionPoint& Q) {
    return snapped(table, table.group->subtract(P.coords, Q.coords));
}

TorsionPoint torsion_mul(const TorsionTable& table, std::int64_t m, const TorsionPoint& P) {
    return snapped(table, table.group->multiply(m, P.coords));
}

// ---------------------------------------------------------------------------

BoxallResult boxall_descent(const FormalGroupPtr& F, const TorsionPoint& P_in, int r) {
    require(F && F->dimension() == 1, ErrorCode::invalid_argument, "descent needs a one-dimensional law");
    const long p = F->structure()->prime();
    require(r >= 1, ErrorCode::invalid_argument, "r must be >= 1");
    require(!(p == 2 && r == 1), ErrorCode::precondition, "p = 2 needs r >= 2");
    const int n = P_in.level;
    require(n > r, ErrorCode::precondition,
            "the point must have level n > r (n = " + std::to_string(n) + ", r = " + std::to_string(r) + ")");
    const auto table = division_points(F, n);
    TorsionPoint P;
    if (P_in.field() == table->field) {
        P = table->find(P_in);
    } else {
        require(table->tower != nullptr, ErrorCode::invalid_argument, "point is not in the torsion tower");
        const int from = table->tower->level_of(P_in.field());
        require(from >= 0, ErrorCode::invalid_argument, "point is not in the torsion tower");
        P.level = n;
        for (const auto& c : P_in.coords) P.coords.push_back(table->tower->map(c, from, n));
        P = table->find(P);
    }
    require(P.level == n, ErrorCode::invalid_argument, "point level does not match the table");

    const Int mod = ipow(p, n), pr = ipow(p, r);
    const std::int64_t tries = small(ipow(p, n - r));
    // P_i = [p^{n-r-i+1}] P for i = 1 .. n-r+1.
    std::vector<TorsionPoint> Pi(n - r + 2);
    for (int i = 1; i <= n - r + 1; ++i) Pi[i] = torsion_mul(*table, small(ipow(p, n - r - i + 1)), P);
    auto moved = [&](const TorsionPoint& X, const Int& u) {
        return torsion_sub(*table, galois_orbit(*table, X, {u, 0}), X);
    };

    BoxallResult res;
    Int u1 = 0;
    for (std::int64_t j = 1; j < tries; ++j) {
        const Int u = 1 + pr * j;
        if (moved(Pi[2], u).level == r) {
            u1 = u;
            break;
        }
    }
    if (u1 != 0) {
        Int ui = u1;
        for (int i = 1; i <= n - r; ++i) {
            if (i > 1) mpz_powm_ui(ui.get_mpz_t(), ui.get_mpz_t(), p, mod.get_mpz_t());
            BoxallStep st{i, ui, moved(Pi[i + 1], ui)};
            require(st.Q.level == r, ErrorCode::internal_assertion,
                    "descent chain: Q_" + std::to_string(i) + " has level " + std::to_string(st.Q.level) +
                        ", expected " + std::to_string(r));
            require(i == 1 || st.Q == res.chain.back().Q, ErrorCode::internal_assertion,
                    "descent chain: Q_" + std::to_string(i) + " differs from Q_" + std::to_string(i - 1));
            res.chain.push_back(std::move(st));
        }
        res.g = {res.chain.back().u, 0};
        res.witness = res.chain.back().Q;
        return res;
    }
    // Base step impossible: search Gal(K(F[p^r])) = {sigma_u : u = 1 mod p^r} directly.
    for (std::int64_t j = 1; j < tries; ++j) {
        const Int u = 1 + pr * j;
        TorsionPoint W = moved(P, u);
        if (W.level == r) {
            res.g = {u, 0};
            res.witness = std::move(W);
            res.by_search = true;
            return res;
        }
    }
    fail(ErrorCode::internal_assertion,
         "no g in Gal(K(F[p^" + std::to_string(r) + "])) moves a level-" + std::to_string(n) +
             " point by a point of exact level " + std::to_string(r) + ": such g act as [u] with u = 1 mod p^" +
             std::to_string(r) + ", so g(P) - P = [u-1]P has level at most " + std::to_string(n - r));
}

}  // namespace padmm
