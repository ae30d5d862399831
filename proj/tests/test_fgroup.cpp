#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padmm/fgroup.hpp"

using namespace padmm;

namespace {

PAdicNumber Z(const StructurePtr& s, long v) { return PAdicNumber::from_int(s, v); }

TruncatedSeries poly1(const StructurePtr& s, int D, const std::vector<long>& c) {
    std::vector<PAdicNumber> v;
    for (long x : c) v.push_back(Z(s, x));
    return TruncatedSeries::univariate(s, D, v);
}

TruncatedSeries lt_poly(const StructurePtr& s, int D) {
    const long p = s->prime();
    std::vector<long> c(p + 1, 0);
    c[1] = p;
    c[p] = 1;
    return poly1(s, D, c);
}

TruncatedSeries honda_log(const StructurePtr& s, int D) {
    std::vector<PAdicNumber> c(D + 1, Z(s, 0));
    c[1] = Z(s, 1);
    if (9 <= D) c[9] = PAdicNumber::from_rational(s, 1, 3);
    auto l = TruncatedSeries::univariate(s, D, c);
    l.set_tail(RationalValuation(-2));
    return l;
}

}  // namespace

TEST_CASE("standard laws") {
    auto Q = Structure::rationals(3, 12);
    const int D = 8;
    auto M = FormalGroupLaw::multiplicative(Q, D);
    auto X = TruncatedSeries::variable(Q, 2, D, 0), Y = TruncatedSeries::variable(Q, 2, D, 1);
    CHECK(M->law()[0].equals(X + Y + X * Y));
    CHECK(check_axioms(*M).all());
    CHECK(check_axioms(*FormalGroupLaw::additive(Q, D)).all());
    CHECK(M->mult_by(2).equals(poly1(Q, D, {0, 2, 1})));
    CHECK(M->mult_by(1).equals(TruncatedSeries::variable(Q, 1, D, 0)));
    CHECK(M->mult_by(0).is_zero());
    // [-1] = (1+X)^{-1} - 1 = -X + X^2 - X^3 ...
    auto inv = M->mult_by(-1);
    for (int k = 1; k <= D; ++k) CHECK(inv.coeff(Exponent{k}).equals(Z(Q, k % 2 ? -1 : 1)));
    REQUIRE(M->division_polynomial());
    CHECK(*M->division_polynomial() == std::vector<Int>{0, 3, 3, 1});
}

TEST_CASE("non-commutative series is caught") {
    auto Q = Structure::rationals(3, 8);
    const int D = 6;
    auto X = TruncatedSeries::variable(Q, 2, D, 0), Y = TruncatedSeries::variable(Q, 2, D, 1);
    auto F = FormalGroupLaw::custom(X + Y + X * X * Y);
    auto r = check_axioms(*F);
    CHECK_FALSE(r.commutativity);
    REQUIRE(r.commutativity_failure);
    CHECK(r.commutativity_failure->second == Exponent{2, 1});
    CHECK(r.identity);
}

TEST_CASE("Lubin-Tate laws") {
    for (long p : {2L, 3L, 5L}) {
        auto Q = Structure::rationals(p, 12);
        const int D = 10;
        auto f = lt_poly(Q, D);
        auto F = FormalGroupLaw::lubin_tate(Q, D, f);
        CHECK(check_axioms(*F).all());
        CHECK(F->mult_by(p).equals(f));
        // Independent check of f(F(X,Y)) = F(f(X), f(Y)).
        auto L = F->law()[0];
        auto lhs = compose(f, {L});
        auto rhs = compose(L, {f.remap(2, {0}), f.remap(2, {1})});
        CHECK(lhs.equals(rhs));
        auto h = F->height();
        CHECK(h.finite);
        CHECK(h.height == 1);
    }
    auto Q = Structure::rationals(3, 10);
    CHECK_THROWS_AS(FormalGroupLaw::lubin_tate(Q, 8, poly1(Q, 8, {0, 9, 0, 1})), Error);
    CHECK_THROWS_AS(FormalGroupLaw::lubin_tate(Q, 8, poly1(Q, 8, {0, 3, 1, 1})), Error);
}

TEST_CASE("logarithm and exponential") {
    auto Q = Structure::rationals(3, 16);
    const int D = 10;
    auto M = FormalGroupLaw::multiplicative(Q, D);
    auto l = M->log();
    for (int k = 1; k <= D; ++k) CHECK(l.coeff(Exponent{k}).equals(PAdicNumber::from_rational(Q, k % 2 ? 1 : -1, k)));
    auto X = TruncatedSeries::variable(Q, 1, D, 0);
    CHECK(compose(M->exp(), {l}).equals(X));
    CHECK(compose(l, {M->exp()}).equals(X));
    CHECK(FormalGroupLaw::additive(Q, D)->log().equals(X));
    // log([3]X) = 3 log X
    CHECK(compose(l, {M->mult_by(3)}).equals(l.scale(Z(Q, 3))));
    // log is a homomorphism to the additive group.
    auto A = FormalGroupLaw::additive(Q, D);
    auto rep = is_homomorphism(l, *M, *A);
    CHECK(rep.homomorphism);
    CHECK(rep.commutes_with_two);
}

TEST_CASE("Honda height two law") {
    auto Q = Structure::rationals(3, 12);
    const int D = 12;
    auto H = FormalGroupLaw::from_log(Q, D, honda_log(Q, D));
    auto ax = check_axioms(*H);
    CHECK(ax.all());
    auto h = H->height();
    CHECK(h.finite);
    CHECK(h.height == 2);
    CHECK(H->log().equals(honda_log(Q, D)));
    // A non-integral logarithm is rejected.
    std::vector<PAdicNumber> c(D + 1, Z(Q, 0));
    c[1] = Z(Q, 1);
    c[3] = PAdicNumber::from_rational(Q, 1, 3);
    CHECK_THROWS_AS(FormalGroupLaw::from_log(Q, D, TruncatedSeries::univariate(Q, D, c)), Error);
}

TEST_CASE("heights") {
    auto Q = Structure::rationals(3, 10);
    CHECK(FormalGroupLaw::multiplicative(Q, 8)->height().height == 1);
    auto a = FormalGroupLaw::additive(Q, 8)->height();
    CHECK_FALSE(a.finite);
    CHECK(a.lower_bound == 1);
}

TEST_CASE("multiplication maps compose") {
    auto Q = Structure::rationals(5, 10);
    const int D = 8;
    auto F = FormalGroupLaw::lubin_tate(Q, D, lt_poly(Q, D));
    for (int m = -3; m <= 3; ++m)
        for (int k = -3; k <= 3; ++k) CHECK(compose(F->mult_by(m), {F->mult_by(k)}).equals(F->mult_by(m * k)));
}

TEST_CASE("homomorphism tests") {
    auto Q = Structure::rationals(3, 10);
    const int D = 8;
    auto M = FormalGroupLaw::multiplicative(Q, D);
    auto two = is_homomorphism(poly1(Q, D, {0, 2, 1}), *M, *M);
    CHECK(two.homomorphism);
    CHECK(two.commutes_with_two);
    auto bad = is_homomorphism(poly1(Q, D, {0, 1, 1}), *M, *M);
    CHECK_FALSE(bad.homomorphism);
    REQUIRE(bad.failure);
    const int deg = (*bad.failure)[0] + (*bad.failure)[1];
    CHECK(deg == 2);
    CHECK(*bad.failure == Exponent{1, 1});
}

TEST_CASE("products act componentwise") {
    auto Q = Structure::rationals(3, 10);
    const int D = 6;
    auto M = FormalGroupLaw::multiplicative(Q, D);
    auto P = FormalGroupLaw::product({M, M});
    CHECK(P->dimension() == 2);
    CHECK(P->law().size() == 2);
    CHECK(check_axioms(*P).all());
    auto s = P->add({Z(Q, 3), Z(Q, 9)}, {Z(Q, 3), Z(Q, 0)});
    CHECK(s.coords[0].equals(Z(Q, 15)));
    CHECK(s.coords[1].equals(Z(Q, 9)));
    auto t = P->multiply(3, {Z(Q, 3), Z(Q, 3)});
    CHECK(t.coords[0].equals(Z(Q, 63)));
}
