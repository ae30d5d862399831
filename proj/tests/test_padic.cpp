#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padmm/padic.hpp"

using namespace padmm;

namespace {

Int reduce(const PAdicNumber& x, int digits) {
    const auto y = x.with_precision(digits);
    REQUIRE(y.denominator_exponent() == 0);
    return y.coefficients()[0];
}

Int ipow(long p, int k) {
    Int r = 1;
    for (int i = 0; i < k; ++i) r *= p;
    return r;
}

}  // namespace

TEST_CASE("valuation arithmetic and parsing") {
    CHECK(RationalValuation(2, 4).to_string() == "1/2");
    CHECK(RationalValuation(-1, 6).to_string() == "-1/6");
    CHECK(RationalValuation::parse("inf").is_infinite());
    CHECK(RationalValuation::parse("3/9") == RationalValuation(1, 3));
    CHECK(RationalValuation(1, 2) < RationalValuation(2, 3));
    CHECK(RationalValuation(5) < RationalValuation::infinity());
    CHECK(RationalValuation(7, 2).floor_scaled(1) == 3);
    CHECK(RationalValuation(-7, 2).floor_scaled(1) == -4);
    CHECK(RationalValuation(-7, 2).ceil_scaled(1) == -3);
    CHECK_THROWS_AS(RationalValuation::parse("x/2"), Error);
}

TEST_CASE("one quarter in Z_3") {
    auto Q3 = Structure::rationals(3, 4);
    auto q = PAdicNumber::one(Q3) / PAdicNumber::from_int(Q3, 4);
    CHECK(reduce(q, 4) == 61);
    CHECK(q.valuation() == RationalValuation(0));
}

TEST_CASE("rational arithmetic agrees with modular integer arithmetic") {
    std::mt19937 rng(7);
    for (long p : {2L, 3L, 5L, 7L}) {
        const int N = 10;
        auto Q = Structure::rationals(p, N);
        const Int M = ipow(p, N);
        for (int it = 0; it < 50; ++it) {
            const long a = static_cast<long>(rng() % 100000) - 50000;
            long b = static_cast<long>(rng() % 1000) + 1;
            if (b % p == 0) ++b;
            const auto x = PAdicNumber::from_int(Q, a);
            const auto y = PAdicNumber::from_int(Q, b);
            Int binv;
            Int bm = Int(b) % M;
            mpz_invert(binv.get_mpz_t(), bm.get_mpz_t(), M.get_mpz_t());
            Int expect = (Int(a) * binv) % M;
            if (expect < 0) expect += M;
            CHECK(reduce(x / y, N) == expect);
            Int prod = (Int(a) * b) % M;
            if (prod < 0) prod += M;
            CHECK(reduce(x * y, N) == prod);
        }
    }
}

TEST_CASE("valuations and negative powers") {
    auto Q = Structure::rationals(5, 6);
    auto x = PAdicNumber::from_rational(Q, 3, 250);
    CHECK(x.valuation() == RationalValuation(-3));
    auto y = x * PAdicNumber::from_int(Q, 250);
    CHECK(y.equals(PAdicNumber::from_int(Q, 3)));
    CHECK(PAdicNumber::zero(Q).valuation().is_infinite());
    CHECK_THROWS_AS(PAdicNumber::one(Q) / PAdicNumber::zero(Q), Error);
}

TEST_CASE("Teichmuller lift") {
    auto Q = Structure::rationals(5, 2);
    auto w = teichmuller_lift(Q, {2});
    CHECK(reduce(w, 2) == 7);
    CHECK(w.pow(4).equals(PAdicNumber::one(Q)));
    auto Q7 = Structure::rationals(7, 8);
    for (long r = 1; r < 7; ++r) {
        auto t = teichmuller_lift(Q7, {r});
        CHECK(t.pow(6).equals(PAdicNumber::one(Q7)));
        CHECK(t.residue()[0] == r);
    }
}

TEST_CASE("Hensel lifting") {
    auto Q = Structure::rationals(3, 4);
    auto r = hensel_root(poly_from_ints(Q, {-4, 0, 1}), PAdicNumber::one(Q));
    CHECK(reduce(r, 4) == 79);
    CHECK_THROWS_AS(hensel_root(poly_from_ints(Q, {-3, 0, 1}), PAdicNumber::one(Q)), Error);
    auto Q5 = Structure::rationals(5, 6);
    auto five = hensel_root(poly_from_ints(Q5, {-5, 1}), PAdicNumber::from_int(Q5, 5));
    CHECK(five.equals(PAdicNumber::from_int(Q5, 5)));
}

TEST_CASE("Newton polygon of an Eisenstein-like polynomial") {
    auto Q = Structure::rationals(3, 8);
    // 3 + 9X + X^3: single segment of slope 1/3.
    auto np = newton_polygon(poly_from_ints(Q, {3, 9, 0, 1}));
    REQUIRE(np.size() == 1);
    CHECK(np[0].root_valuation == RationalValuation(1, 3));
    CHECK(np[0].length == 3);
    // X^2 - 3X: roots 0? no, (X)(X-3) with constant zero -> one segment.
    auto np2 = newton_polygon(poly_from_ints(Q, {9, -10, 1}));  // roots 1 and 9
    REQUIRE(np2.size() == 2);
    CHECK(np2[0].root_valuation == RationalValuation(0));
    CHECK(np2[1].root_valuation == RationalValuation(2));
    CHECK_THROWS_AS(newton_polygon(poly_from_ints(Q, {0, 0})), Error);
}

TEST_CASE("integral roots over Q_p") {
    auto Q = Structure::rationals(5, 8);
    // (X-1)(X-2)(X-7)(X-25)
    PolyK f = poly_mul(poly_mul(poly_from_ints(Q, {-1, 1}), poly_from_ints(Q, {-2, 1})),
                       poly_mul(poly_from_ints(Q, {-7, 1}), poly_from_ints(Q, {-25, 1})));
    auto roots = integral_roots(f);
    CHECK(roots.size() == 4);
    for (long v : {1L, 2L, 7L, 25L}) {
        bool found = false;
        for (auto& r : roots) found |= r.equals(PAdicNumber::from_int(Q, v));
        CHECK(found);
    }
    CHECK(integral_roots(poly_from_ints(Q, {-2, 0, 1})).empty());
    CHECK(integral_roots(poly_from_ints(Q, {-5, 0, 1})).empty());
}

TEST_CASE("unramified extension") {
    auto Q = Structure::rationals(3, 6);
    auto K = extend_field(Q, {1, 0, 1}, TowerStep::Kind::unramified);  // t^2 + 1
    CHECK(K->f() == 2);
    CHECK(K->residue_cardinality() == 9);
    auto t = PAdicNumber::unramified_generator(K);
    CHECK((t * t).equals(PAdicNumber::from_int(K, -1)));
    auto x = t + PAdicNumber::from_int(K, 2);
    CHECK((x * x.inverse()).equals(PAdicNumber::one(K)));
    // A Teichmuller representative of order 8.
    auto w = teichmuller_lift(K, {1, 1});
    CHECK(w.pow(8).equals(PAdicNumber::one(K)));
    CHECK_FALSE(w.pow(4).equals(PAdicNumber::one(K)));
    CHECK_THROWS_AS(extend_field(Q, {-1, 0, 1}, TowerStep::Kind::unramified), Error);
    // Roots of X^2 + 1 in the extension.
    CHECK(integral_roots(poly_from_ints(K, {1, 0, 1})).size() == 2);
}

TEST_CASE("Eisenstein extension") {
    auto Q = Structure::rationals(2, 10);
    auto K = extend_field(Q, {2, 2, 1}, TowerStep::Kind::eisenstein);  // X^2 + 2X + 2
    CHECK(K->e() == 2);
    auto pi = PAdicNumber::uniformizer(K);
    CHECK(pi.valuation() == RationalValuation(1, 2));
    auto g = pi * pi + pi.mul_int(2) + PAdicNumber::from_int(K, 2);
    CHECK(g.is_zero());
    auto pinv = pi.inverse();
    CHECK(pinv.valuation() == RationalValuation(-1, 2));
    CHECK((pinv * pi).equals(PAdicNumber::one(K)));
    CHECK(pi.shift_pi(-3).valuation() == RationalValuation(-1));
    // pi + 1 is a primitive 4th root of unity: (1+pi)^2 = 1 + 2pi + pi^2 = -1.
    auto z = pi + PAdicNumber::one(K);
    CHECK(z.pow(2).equals(PAdicNumber::from_int(K, -1)));
    CHECK_THROWS_AS(extend_field(Q, {4, 2, 1}, TowerStep::Kind::eisenstein), Error);
    CHECK_THROWS_AS(extend_field(K, {2, 0, 1}, TowerStep::Kind::eisenstein), Error);
    CHECK_THROWS_AS(extend_field(Structure::rationals(2, 1), {2, 0, 1}, TowerStep::Kind::eisenstein), Error);
    auto roots = integral_roots(poly_from_ints(K, {1, 0, 1}));
    CHECK(roots.size() == 2);
    auto emb = PAdicNumber::from_rational(Q, 1, 3).embed(K);
    CHECK((emb.mul_int(3)).equals(PAdicNumber::one(K)));
}

TEST_CASE("irreducibility mod p") {
    CHECK(is_irreducible_mod_p({1, 1, 1}, 2));
    CHECK_FALSE(is_irreducible_mod_p({1, 0, 1}, 2));
    CHECK(is_irreducible_mod_p({1, 1, 0, 1}, 2));
    CHECK_FALSE(is_irreducible_mod_p({1, 0, 0, 0, 1}, 5));
    CHECK(is_irreducible_mod_p({2, 0, 1}, 5));
}
