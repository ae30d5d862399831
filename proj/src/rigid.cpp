#include "padmm/rigid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace padmm {

std::vector<PAdicNumber> RootTable::tuple(std::size_t i) const {
    std::vector<PAdicNumber> out;
    for (std::size_t k : tuples.at(i)) out.push_back(roots[k].value);
    return out;
}

long residue_order(long p, long m) {
    require(m >= 1 && std::gcd(p, m) == 1, ErrorCode::invalid_argument, "order must be prime to p");
    if (m == 1) return 1;
    long x = p % m, k = 1;
    while (x != 1) {
        x = x * (p % m) % m;
        ++k;
    }
    return k;
}

RootTable roots_of_unity(const std::vector<long>& orders_in, int n, const StructurePtr& base) {
    require(base->degree() == 1, ErrorCode::precondition, "roots of unity are built over Q_p");
    require(n >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    require(!orders_in.empty(), ErrorCode::invalid_argument, "no orders requested");
    const long p = base->prime();
    std::vector<long> orders = orders_in;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    long F = 1;
    int A = 0;
    for (long m : orders) {
        require(m >= 1, ErrorCode::invalid_argument, "orders must be positive");
        long mp = m;
        int a = 0;
        while (mp % p == 0) {
            mp /= p;
            ++a;
        }
        F = std::lcm(F, residue_order(p, mp));
        A = std::max(A, a);
    }
    require(F <= 12, ErrorCode::budget, "unramified degree " + std::to_string(F) + " exceeds the budget");
    const StructurePtr U =
        F > 1 ? extend_field(base, smallest_irreducible_mod_p(p, static_cast<int>(F)), TowerStep::Kind::unramified)
              : base;
    const auto mu = division_points(FormalGroupLaw::multiplicative(U, 4), A);
    RootTable t;
    t.field = mu->field;

    // Prime-to-p roots: Teichmüller lifts, by exact order.
    const ResidueField& R = U->residue_field();
    const long q = R.cardinality();
    require(q <= 100000, ErrorCode::budget, "residue field too large");
    std::vector<std::pair<long, PAdicNumber>> teich;  // (order, lift)
    for (long idx = 1; idx < q; ++idx) {
        const auto x = R.element(idx);
        long ord = 0;
        for (long d = 1; d <= q - 1; ++d)
            if ((q - 1) % d == 0 && R.pow(x, d) == R.one()) {
                ord = d;
                break;
            }
        teich.push_back({ord, teichmuller_lift(U, x).embed(t.field)});
    }
    for (long m : orders) {
        long mp = m;
        int a = 0;
        while (mp % p == 0) {
            mp /= p;
            ++a;
        }
        for (const auto& [ord, w] : teich) {
            if (ord != mp) continue;
            for (const auto& P : mu->exact_level(a))
                t.roots.push_back({w * (PAdicNumber::one(t.field) + P.coords[0]), m});
        }
        require(static_cast<long>(t.roots.size()) <= kRootBudget, ErrorCode::budget, "too many roots of unity");
    }
    std::vector<std::pair<std::string, std::size_t>> order;
    for (std::size_t i = 0; i < t.roots.size(); ++i)
        order.push_back({std::to_string(t.roots[i].order) + "/" + t.roots[i].value.key(), i});
    std::sort(order.begin(), order.end(), [&](const auto& x, const auto& y) {
        const long ox = t.roots[x.second].order, oy = t.roots[y.second].order;
        return ox != oy ? ox < oy : x.first < y.first;
    });
    std::vector<RootOfUnity> sorted;
    for (const auto& o : order) sorted.push_back(t.roots[o.second]);
    t.roots = std::move(sorted);

    long total = 1;
    for (int i = 0; i < n; ++i) {
        total *= static_cast<long>(t.roots.size());
        require(total <= kRootBudget * 500, ErrorCode::budget, "too many tuples of roots of unity");
    }
    std::vector<std::size_t> idx(n, 0);
    for (long k = 0; k < total; ++k) {
        t.tuples.push_back(idx);
        for (int i = n; i-- > 0;) {
            if (++idx[i] < t.roots.size()) break;
            idx[i] = 0;
        }
    }
    return t;
}

StabilityResult p_power_stability(const FormalSubscheme& X, const std::vector<std::vector<PAdicNumber>>& sample) {
    require(!sample.empty(), ErrorCode::invalid_argument, "empty sample");
    StabilityResult res;
    for (const auto& P : sample) {
        require(distance(X, P).is_infinite(), ErrorCode::precondition, "sample point is not on X");
        const long p = P[0].structure()->prime();
        std::vector<PAdicNumber> Pp;
        for (const auto& x : P) Pp.push_back(x.pow(p));
        if (!distance(X, Pp).is_infinite()) {
            res.stable = false;
            res.counterexample = P;
            return res;
        }
    }
    return res;
}

PAdicNumber log1p(const PAdicNumber& x) {
    const StructurePtr& K = x.structure();
    if (x.is_zero()) return x;
    const RationalValuation v = x.valuation();
    require(v > RationalValuation(0), ErrorCode::domain, "log(1 + x) needs v(x) > 0");
    const double vd = static_cast<double>(v.num()) / static_cast<double>(v.den());
    const double target = static_cast<double>(x.precision_digits()) / K->e() + 1.0;
    const double lp = std::log(static_cast<double>(K->prime()));
    PAdicNumber sum = PAdicNumber::zero(K), pw = x;
    for (long k = 1;; ++k) {
        const PAdicNumber term = pw / PAdicNumber::from_int(K, k);
        sum = (k % 2) ? sum + term : sum - term;
        // Later terms have valuation >= k v - log_p k, increasing past 1/(v ln p).
        const double kk = static_cast<double>(k + 1);
        if (kk * vd - std::log(kk) / lp > target && kk > 1.0 / (vd * lp)) break;
        pw = pw * x;
        require(k < 100000, ErrorCode::budget, "logarithm series did not converge within the budget");
    }
    return sum;
}

std::optional<RelationLattice> subtorus_from_log(const std::vector<std::vector<PAdicNumber>>& points) {
    require(points.size() >= 2, ErrorCode::invalid_argument, "need at least 2 points");
    const std::size_t n = points[0].size();
    require(n >= 1, ErrorCode::invalid_argument, "empty point");
    const StructurePtr K = points[0][0].structure();
    const long p = K->prime();
    const RationalValuation conv(1, p - 1);
    std::vector<std::vector<PAdicNumber>> logs;
    int kmax = 0, precmin = K->cap_digits();
    for (const auto& P : points) {
        require(P.size() == n, ErrorCode::invalid_argument, "points of different dimensions");
        std::vector<PAdicNumber> row;
        for (const auto& x : P) {
            require(x.is_zero() || x.valuation() > conv, ErrorCode::precondition,
                    "coordinate valuation must exceed 1/(p-1)");
            const PAdicNumber l = log1p(x.embed(K));
            kmax = std::max(kmax, l.denominator_exponent());
            precmin = std::min(precmin, l.precision_digits());
            row.push_back(l);
        }
        logs.push_back(std::move(row));
    }
    const int e = K->e(), d = K->degree();
    const int M = (precmin + kmax * e) / e - 1;
    require(M >= 2, ErrorCode::precision, "precision too low to detect relations");
    Int P = 1;
    for (int i = 0; i < M; ++i) P *= p;
    // Equations: for each point and basis coordinate, sum_i m_i a_i + P s = 0.
    IntMat A;
    const std::size_t neq = points.size() * d;
    for (std::size_t t = 0; t < points.size(); ++t)
        for (int j = 0; j < d; ++j) {
            IntVec row(n + neq, 0);
            for (std::size_t i = 0; i < n; ++i) {
                const PAdicNumber& l = logs[t][i];
                Int a = l.coefficients()[j];
                for (int s = l.denominator_exponent(); s < kmax; ++s) a *= p;
                row[i] = a % P;
            }
            row[n + t * d + j] = P;
            A.push_back(std::move(row));
        }
    IntMat gens;
    for (auto& v : integer_kernel(A, n + neq)) gens.push_back(IntVec(v.begin(), v.begin() + n));
    const IntMat L = lll_reduce(hermite_basis(gens));
    Int B;
    mpz_root(B.get_mpz_t(), P.get_mpz_t(), 2 * n);
    IntMat rel;
    for (const auto& v : L) {
        bool small = true;
        for (const auto& x : v) small = small && abs(x) <= B;
        if (small) rel.push_back(v);
    }
    if (rel.empty()) return std::nullopt;
    RelationLattice out{hermite_basis(rel)};
    // Exponentiated check: prod (1 + x_i)^{m_i} = 1 on every point.
    const RationalValuation floor = membership_floor(K, 4 + kmax + 1);
    for (const auto& m : out.basis)
        for (const auto& Pt : points) {
            PAdicNumber prod = PAdicNumber::one(K);
            for (std::size_t i = 0; i < n; ++i) {
                const PAdicNumber u = PAdicNumber::one(K) + Pt[i].embed(K);
                const long k = m[i].get_si();
                const PAdicNumber uk = u.pow(k < 0 ? -k : k);
                prod = prod * (k < 0 ? uk.inverse() : uk);
            }
            const PAdicNumber diff = prod - PAdicNumber::one(K);
            require(diff.is_zero() || diff.valuation() >= min(floor, diff.precision()), ErrorCode::internal_assertion,
                    "log relation does not exponentiate to 1");
        }
    return out;
}

LambdaLattice lambda_lattice(int n, const std::vector<StabilizerFamily>& families) {
    require(n >= 1, ErrorCode::invalid_argument, "dimension must be >= 1");
    std::size_t slack = 0;
    for (const auto& f : families) {
        require(static_cast<int>(f.exponents.size()) == n, ErrorCode::invalid_argument,
                "stabilizer tuple has the wrong dimension");
        require(f.order >= 0, ErrorCode::invalid_argument, "inconsistent orders: order must be >= 0");
        if (f.order > 0) ++slack;
    }
    const std::size_t cols = n + slack;
    IntMat A;
    std::size_t s = 0;
    for (const auto& f : families) {
        IntVec row(cols, 0);
        for (int i = 0; i < n; ++i) row[i] = f.exponents[i];
        if (f.order > 0) row[n + s++] = f.order;
        A.push_back(std::move(row));
    }
    IntMat gens;
    for (auto& v : integer_kernel(A, cols)) gens.push_back(IntVec(v.begin(), v.begin() + n));
    LambdaLattice L;
    L.n = n;
    L.basis = hermite_basis(gens);
    L.finite_stabilizer = static_cast<int>(L.basis.size()) == n;
    if (!L.finite_stabilizer) {
        IntMat perp;
        if (L.basis.empty()) {
            IntVec e1(n, 0);
            e1[0] = 1;
            perp.push_back(e1);
        } else {
            perp = hermite_basis(integer_kernel(L.basis, n));
        }
        L.normal = perp.at(0);
    }
    for (const auto& lam : L.basis) {
        for (const auto& f : families) {
            Int v = 0;
            for (int i = 0; i < n; ++i) v += lam[i] * f.exponents[i];
            require(f.order == 0 ? v == 0 : v % f.order == 0, ErrorCode::internal_assertion,
                    "lattice vector violates a character relation");
        }
        if (!L.normal.empty())
            require(dot(lam, L.normal) == 0, ErrorCode::internal_assertion, "normal is not orthogonal");
    }
    return L;
}

EtaProjection eta_projection(const TruncatedSeries& rho, const LambdaLattice& lambda,
                             const std::vector<PAdicNumber>& zeta) {
    const int n = rho.variables();
    require(n >= 2, ErrorCode::invalid_argument, "eta projection needs at least 2 variables");
    require(lambda.n == n && static_cast<int>(zeta.size()) == n, ErrorCode::invalid_argument, "dimension mismatch");
    require(!lambda.finite_stabilizer, ErrorCode::precondition, "finite stabilizer: there is no hyperplane normal");
    const IntVec& c = lambda.normal;
    require(c[n - 1] != 0, ErrorCode::invalid_argument, "c_n = 0: permute the variables so that c_n != 0");
    require(rho.exact(), ErrorCode::precondition, "rho must be a polynomial");
    const MonomialIndex& I = rho.index();
    int nu = -1;
    for (std::size_t i = 0; i < rho.size(); ++i)
        if (!rho.coeff(i).is_zero()) nu = std::max(nu, I.exponent(i)[n - 1]);
    require(nu >= 0, ErrorCode::invalid_argument, "rho is zero");
    for (std::size_t i = 0; i < rho.size(); ++i) {
        const Exponent& ex = I.exponent(i);
        if (rho.coeff(i).is_zero() || ex[n - 1] != nu) continue;
        const bool pure = I.degree(i) == nu;
        require(pure && rho.coeff(i).equals(PAdicNumber::one(rho.structure())), ErrorCode::precondition,
                "rho is not monic-distinguished in X_n");
    }
    const StructurePtr& K = zeta[0].structure();
    FormalSubscheme Z{nullptr, {rho}};
    require(distance(Z, zeta).is_infinite(), ErrorCode::precondition, "zeta is not on the zero set of rho");

    // eta^{c_n} = zeta_n^{-1}
    const long cn = c[n - 1].get_si();
    const PAdicNumber rhs = cn > 0 ? zeta[n - 1].inverse() : zeta[n - 1];
    PolyK poly(std::labs(cn) + 1, PAdicNumber::zero(K));
    poly[0] = -rhs;
    poly.back() = PAdicNumber::one(K);
    const auto roots = integral_roots(poly);
    require(!roots.empty(), ErrorCode::domain, "no eta of the required order in " + K->describe());
    EtaProjection out;
    out.eta = roots.front();
    for (int i = 0; i + 1 < n; ++i) {
        const long ci = c[i].get_si();
        const PAdicNumber ep = out.eta.pow(std::labs(ci));
        out.projected.push_back(zeta[i] * (ci < 0 ? ep.inverse() : ep));
    }
    TruncatedSeries rb(rho.structure(), n - 1, rho.cap());
    for (std::size_t i = 0; i < rho.size(); ++i) {
        if (rho.coeff(i).is_zero()) continue;
        const Exponent& ex = I.exponent(i);
        const Exponent head(ex.begin(), ex.end() - 1);
        rb.set(head, rb.coeff(head) + rho.coeff(i));
        SupportCheck sc;
        sc.monomial = ex;
        for (int k = 0; k < n; ++k) sc.shifted.push_back(k + 1 < n ? ex[k] : ex[k] - nu);
        sc.in_lambda = in_lattice(lambda.basis, sc.shifted);
        out.support.push_back(std::move(sc));
    }
    out.rho_bar = rb;
    out.support_ok = std::all_of(out.support.begin(), out.support.end(), [](const auto& s) { return s.in_lambda; });
    const Evaluation ev = evaluate(rb, out.projected);
    const RationalValuation v = ev.value.is_zero() ? ev.value.precision() : ev.value.valuation();
    out.value_valuation = min(v, ev.tail_bound);
    out.vanishes = out.value_valuation >= membership_floor(K);
    if (out.vanishes) out.value_valuation = RationalValuation::infinity();
    return out;
}

}  // namespace padmm
