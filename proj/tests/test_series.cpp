#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "padmm/series.hpp"

using namespace padmm;

namespace {

PAdicNumber Z(const StructurePtr& s, long v) { return PAdicNumber::from_int(s, v); }

TruncatedSeries poly1(const StructurePtr& s, int D, const std::vector<long>& c) {
    std::vector<PAdicNumber> v;
    for (long x : c) v.push_back(Z(s, x));
    return TruncatedSeries::univariate(s, D, v);
}

TruncatedSeries log1p(const StructurePtr& s, int D) {
    std::vector<PAdicNumber> c{Z(s, 0)};
    for (int k = 1; k <= D; ++k) c.push_back(PAdicNumber::from_rational(s, k % 2 ? 1 : -1, k));
    auto f = TruncatedSeries::univariate(s, D, c);
    f.set_tail(RationalValuation(-2));
    return f;
}

TruncatedSeries expm1(const StructurePtr& s, int D) {
    std::vector<PAdicNumber> c{Z(s, 0)};
    Int fact = 1;
    for (int k = 1; k <= D; ++k) {
        fact *= k;
        c.push_back(PAdicNumber::from_rational(s, 1, fact));
    }
    auto f = TruncatedSeries::univariate(s, D, c);
    f.set_tail(RationalValuation(-8));
    return f;
}

TruncatedSeries random_series(std::mt19937& rng, const StructurePtr& s, int n, int D, bool constant) {
    TruncatedSeries f(s, n, D);
    for (std::size_t i = constant ? 0 : 1; i < f.size(); ++i)
        if (rng() % 3 == 0) f.set(i, Z(s, static_cast<long>(rng() % 50) - 25));
    return f;
}

}  // namespace

TEST_CASE("monomial ranking is a bijection onto graded order") {
    for (int n : {1, 2, 3, 4}) {
        const auto idx = MonomialIndex::get(n, 9);
        for (std::size_t i = 0; i < idx->size(); ++i) {
            CHECK(idx->rank(idx->exponent(i)) == i);
            if (i > 0) CHECK(idx->degree(i) >= idx->degree(i - 1));
        }
        CHECK(idx->count_up_to(0) == 1);
    }
    const auto idx = MonomialIndex::get(2, 3);
    CHECK(idx->size() == 10);
    CHECK(idx->exponent(1) == Exponent{1, 0});
    CHECK(idx->exponent(2) == Exponent{0, 1});
}

TEST_CASE("evaluation of the multiplicative law") {
    auto Q = Structure::rationals(3, 10);
    const int D = 8;
    auto X = TruncatedSeries::variable(Q, 2, D, 0), Y = TruncatedSeries::variable(Q, 2, D, 1);
    auto F = X + Y + X * Y;
    CHECK(F.exact());
    auto ev = evaluate(F, {Z(Q, 3), Z(Q, 3)});
    CHECK(ev.value.equals(Z(Q, 15)));
    CHECK(ev.tail_bound.is_infinite());
    CHECK_THROWS_AS(evaluate(F, {Z(Q, 3)}), Error);
}

TEST_CASE("evaluation of a truncated logarithm reports its tail") {
    auto Q = Structure::rationals(3, 20);
    const int D = 12;
    auto L = log1p(Q, D);
    auto ev = evaluate(L, {Z(Q, 3)});
    CHECK_FALSE(ev.tail_bound.is_infinite());
    CHECK(ev.tail_bound == RationalValuation(-2 + 13));
    CHECK_THROWS_AS(evaluate(L, {Z(Q, 1)}), Error);
}

TEST_CASE("composition and reversion") {
    auto Q = Structure::rationals(5, 12);
    const int D = 10;
    auto X = TruncatedSeries::variable(Q, 1, D, 0);
    auto f = poly1(Q, D, {0, 1, 1});
    CHECK(compose(f, {X}).equals(f));
    auto r = reversion(f);
    // Signed Catalan numbers.
    const long cat[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862};
    for (int k = 1; k <= D; ++k) CHECK(r.coeff(Exponent{k}).equals(Z(Q, (k % 2 ? 1 : -1) * cat[k - 1])));
    CHECK(compose(f, {r}).equals(X));
    CHECK(compose(r, {f}).equals(X));
    CHECK(reversion(r).equals(f));
    CHECK(reversion(X).equals(X));
    CHECK_THROWS_AS(reversion(poly1(Q, D, {0, 0, 1})), Error);
    CHECK_THROWS_AS(reversion(poly1(Q, D, {0, 5, 1})), Error);
    CHECK_THROWS_AS(compose(X, {poly1(Q, D, {1, 1})}), Error);
}

TEST_CASE("log and exp are compositional inverses") {
    auto Q = Structure::rationals(3, 30);
    const int D = 12;
    auto X = TruncatedSeries::variable(Q, 1, D, 0);
    CHECK(compose(log1p(Q, D), {expm1(Q, D)}).equals(X));
    CHECK(reversion(log1p(Q, D)).equals(expm1(Q, D)));
}

TEST_CASE("composition is associative on random series") {
    std::mt19937 rng(11);
    auto Q = Structure::rationals(7, 10);
    const int D = 7;
    for (int t = 0; t < 5; ++t) {
        auto f = random_series(rng, Q, 2, D, true);
        auto g1 = random_series(rng, Q, 2, D, false), g2 = random_series(rng, Q, 2, D, false);
        auto h1 = random_series(rng, Q, 2, D, false), h2 = random_series(rng, Q, 2, D, false);
        auto lhs = compose(compose(f, {g1, g2}), {h1, h2});
        auto rhs = compose(f, {compose(g1, {h1, h2}), compose(g2, {h1, h2})});
        CHECK(lhs.equals(rhs));
    }
}

TEST_CASE("evaluation is multiplicative on polynomials") {
    std::mt19937 rng(5);
    auto Q = Structure::rationals(3, 16);
    const int D = 12;
    for (int t = 0; t < 5; ++t) {
        auto f = random_series(rng, Q, 2, 6, true).with_cap(D);
        auto g = random_series(rng, Q, 2, 6, true).with_cap(D);
        std::vector<PAdicNumber> P{Z(Q, static_cast<long>(rng() % 100)), Z(Q, static_cast<long>(rng() % 100))};
        auto fg = f * g;
        REQUIRE(fg.exact());
        CHECK(evaluate(fg, P).value.equals(evaluate(f, P).value * evaluate(g, P).value));
    }
}

TEST_CASE("composition with constants") {
    auto Q = Structure::rationals(3, 10);
    const int D = 6;
    auto X = TruncatedSeries::variable(Q, 2, D, 0), Y = TruncatedSeries::variable(Q, 2, D, 1);
    auto F = X + Y + X * Y;
    auto Y1 = TruncatedSeries::variable(Q, 1, D, 0);
    auto b = TruncatedSeries::constant(Q, 1, D, Z(Q, 6));
    auto t = compose_shifted(F, {Y1, b});
    // Y(1+b) + b
    CHECK(t.equals(Y1.scale(Z(Q, 7)) + b));
}

TEST_CASE("Weierstrass preparation") {
    auto Q = Structure::rationals(3, 12);
    const int D = 10;
    auto f = poly1(Q, D, {3, 1});
    auto w = weierstrass_prepare(f, 0);
    CHECK(w.degree == 1);
    CHECK(w.dpoly.equals(f));
    CHECK(w.unit.equals(poly1(Q, D, {1})));

    auto g = poly1(Q, D, {3, 0, 1}) * poly1(Q, D, {1, 3});
    auto wg = weierstrass_prepare(g, 0);
    CHECK(wg.degree == 2);
    CHECK(wg.dpoly.equals(poly1(Q, D, {3, 0, 1})));
    CHECK(wg.unit.equals(poly1(Q, D, {1, 3})));
    CHECK((wg.unit * wg.dpoly).equals(g));

    CHECK_THROWS_AS(weierstrass_prepare(poly1(Q, D, {3, 9}), 0), Error);
}

TEST_CASE("Weierstrass preparation in two variables") {
    std::mt19937 rng(3);
    auto Q = Structure::rationals(5, 10);
    const int D = 6;
    auto X1 = TruncatedSeries::variable(Q, 2, D, 0), X2 = TruncatedSeries::variable(Q, 2, D, 1);
    // f = (X2^2 + X1 + 5)(1 + X1 + X2)
    auto one = TruncatedSeries::constant(Q, 2, D, Z(Q, 1));
    auto f = (X2 * X2 + X1 + one.scale(Z(Q, 5))) * (one + X1 + X2);
    auto w = weierstrass_prepare(f, 1);
    CHECK(w.degree == 2);
    CHECK((w.unit * w.dpoly).equals(f));
    CHECK(w.coefficients.size() == 3);
    CHECK(w.coefficients[2].equals(one));
    CHECK(w.dpoly.equals(X2 * X2 + X1 + one.scale(Z(Q, 5))));
}

TEST_CASE("series text round trip") {
    auto Q = Structure::rationals(3, 10);
    const int D = 9;
    auto L = log1p(Q, D);
    const std::string text = series_to_text(L);
    auto back = series_from_text(text);
    CHECK(series_to_text(back) == text);
    CHECK(back.equals(L));
    auto K = extend_field(Q, {3, 3, 1}, TowerStep::Kind::eisenstein);
    auto pi = PAdicNumber::uniformizer(K);
    TruncatedSeries g(K, 2, 4);
    g.set(Exponent{1, 1}, pi + Z(K, 1));
    g.set(Exponent{2, 0}, pi.inverse());
    const std::string gt = series_to_text(g);
    CHECK(series_to_text(series_from_text(gt)) == gt);
    auto q = series_from_terms(Q, 1, 9, "9 : q:1/3\n1 : 1\n");
    CHECK(q.coeff(Exponent{9}).equals(PAdicNumber::from_rational(Q, 1, 3)));
    CHECK_THROWS_AS(series_from_terms(Q, 1, 9, "1,2 : 1\n"), Error);
    CHECK_THROWS_AS(series_from_terms(Q, 1, 9, "1 : 7\n"), Error);
}

TEST_CASE("coefficient digits") {
    auto Q = Structure::rationals(3, 4);
    auto x = PAdicNumber::from_int(Q, 61).with_precision(4);
    CHECK(coefficient_to_text(x) == "1202");
    auto y = PAdicNumber::from_rational(Q, 1, 3).with_precision(2);
    CHECK(coefficient_to_text(y) == "1.00");
    CHECK(coefficient_from_text(Q, "1.00").equals(y));
}
