#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padmm/rigid.hpp"

using namespace padmm;

namespace {

bool is_one(const PAdicNumber& x) {
    const PAdicNumber d = x - PAdicNumber::one(x.structure());
    return d.is_zero() || d.valuation() >= membership_floor(x.structure());
}

// Exact order m: x^m = 1 and x^{m/q} != 1 for each prime q | m.
bool exact_order(const PAdicNumber& x, long m) {
    if (!is_one(x.pow(m))) return false;
    long r = m;
    for (long q = 2; q <= r; ++q) {
        if (r % q) continue;
        while (r % q == 0) r /= q;
        if (is_one(x.pow(m / q))) return false;
    }
    return true;
}

std::uint64_t lcg(std::uint64_t& s) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
}

}  // namespace

TEST_CASE("roots of unity") {
    auto Q = Structure::rationals(3, 16);
    auto t2 = roots_of_unity({2}, 1, Q);
    REQUIRE(t2.roots.size() == 1);
    CHECK(t2.roots[0].value.equals(-PAdicNumber::one(t2.field)));
    CHECK(residue_order(3, 8) == 2);

    auto t8 = roots_of_unity({8}, 1, Q);
    CHECK(t8.field->f() == 2);
    CHECK(t8.field->e() == 1);
    CHECK(t8.roots.size() == 4);
    for (const auto& z : t8.roots) {
        CHECK(exact_order(z.value, 8));
        CHECK(frobenius(z.value, 1).equals(z.value.pow(3)));
    }

    auto t24 = roots_of_unity({24}, 1, Q);
    CHECK(t24.field->e() == 2);
    CHECK(t24.field->f() == 2);
    CHECK(t24.roots.size() == 8);
    for (const auto& z : t24.roots) CHECK(exact_order(z.value, 24));

    auto pairs = roots_of_unity({1, 3}, 2, Q);
    CHECK(pairs.roots.size() == 3);
    CHECK(pairs.tuples.size() == 9);
    CHECK(pairs.roots[0].order == 1);
    CHECK_THROWS_AS(roots_of_unity({0}, 1, Q), Error);
}

TEST_CASE("p-power stability") {
    auto Q = Structure::rationals(3, 16);
    auto t = roots_of_unity({1, 3, 9}, 2, Q);
    const auto K = t.field;
    auto M2 = FormalGroupLaw::product({FormalGroupLaw::multiplicative(K, 4), FormalGroupLaw::multiplicative(K, 4)});
    auto Y1 = TruncatedSeries::variable(K, 2, 4, 0), Y2 = TruncatedSeries::variable(K, 2, 4, 1);
    auto diag = FormalSubscheme::make(M2, {Y1 - Y2});
    std::vector<std::vector<PAdicNumber>> sample;
    for (const auto& z : t.roots) sample.push_back({z.value, z.value});
    CHECK(p_power_stability(diag, sample).stable);

    PAdicNumber z3;
    for (const auto& z : t.roots)
        if (z.order == 3) z3 = z.value;
    auto coset = FormalSubscheme::make(M2, {Y1 - TruncatedSeries::constant(K, 2, 4, z3)});
    auto res = p_power_stability(coset, {{z3, z3}});
    CHECK_FALSE(res.stable);
    REQUIRE(res.counterexample.has_value());
    CHECK(res.counterexample->at(0).equals(z3));
    CHECK_THROWS_AS(p_power_stability(coset, {}), Error);
    try {
        p_power_stability(coset, {{PAdicNumber::one(K), z3}});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::precondition);
    }
}

TEST_CASE("logarithm") {
    auto Q = Structure::rationals(3, 20);
    const auto x = PAdicNumber::from_int(Q, 3);
    const auto y = PAdicNumber::from_int(Q, 6);
    // log(1+x) + log(1+y) = log((1+x)(1+y))
    const auto xy = x + y + x * y;
    const auto lhs = log1p(x) + log1p(y);
    const auto d = lhs - log1p(xy);
    CHECK((d.is_zero() || d.valuation() >= RationalValuation(14)));
    CHECK(log1p(x).valuation() == RationalValuation(1));
    CHECK_THROWS_AS(log1p(PAdicNumber::one(Q)), Error);
}

TEST_CASE("subtorus from logarithms") {
    auto Q = Structure::rationals(3, 24);
    std::vector<std::vector<PAdicNumber>> pts;
    for (long s : {4, 7, 10, 13}) {
        const auto t = PAdicNumber::from_int(Q, s);
        const auto one = PAdicNumber::one(Q);
        pts.push_back({t.pow(3) - one, t.pow(2) - one});
    }
    auto L = subtorus_from_log(pts);
    REQUIRE(L.has_value());
    REQUIRE(L->rank() == 1);
    CHECK(L->basis[0] == IntVec{2, -3});

    std::uint64_t seed = 7;
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<std::vector<PAdicNumber>> rnd;
        for (int k = 0; k < 3; ++k)
            rnd.push_back({PAdicNumber::from_int(Q, 3 * static_cast<long>(lcg(seed) % 100000 + 1)),
                           PAdicNumber::from_int(Q, 3 * static_cast<long>(lcg(seed) % 100000 + 1))});
        CHECK_FALSE(subtorus_from_log(rnd).has_value());
    }
    CHECK_THROWS_AS(subtorus_from_log({pts[0]}), Error);
    CHECK_THROWS_AS(subtorus_from_log({{PAdicNumber::from_int(Q, 1)}, {PAdicNumber::from_int(Q, 3)}}), Error);
}

TEST_CASE("lambda lattice") {
    auto diag = lambda_lattice(2, {{{1, 1}, 0}});
    REQUIRE(diag.basis.size() == 1);
    CHECK(diag.basis[0] == IntVec{1, -1});
    CHECK(diag.normal == IntVec{1, 1});
    auto anti = lambda_lattice(2, {{{1, -1}, 0}});
    CHECK(anti.normal == IntVec{1, -1});
    CHECK(lambda_lattice(2, {}).finite_stabilizer);
    CHECK(lambda_lattice(2, {{{1, 1}, 3}}).finite_stabilizer);
    auto none = lambda_lattice(3, {{{1, 0, 0}, 0}, {{0, 1, 0}, 0}, {{0, 0, 1}, 0}});
    CHECK(none.basis.empty());
    CHECK(none.normal == IntVec{1, 0, 0});
    CHECK_THROWS_AS(lambda_lattice(2, {{{1, 1, 1}, 0}}), Error);
    CHECK_THROWS_AS(lambda_lattice(2, {{{1, 1}, -2}}), Error);
}

TEST_CASE("eta projection") {
    auto Q = Structure::rationals(3, 16);
    auto t = roots_of_unity({3}, 1, Q);
    const auto K = t.field;
    const auto z3 = t.roots[0].value;
    auto X1 = TruncatedSeries::variable(Q, 2, 4, 0), X2 = TruncatedSeries::variable(Q, 2, 4, 1);
    auto lam = lambda_lattice(2, {{{1, 1}, 0}});
    auto res = eta_projection(X2 - X1, lam, {z3, z3});
    CHECK(res.eta.equals(z3.inverse()));
    REQUIRE(res.projected.size() == 1);
    CHECK(is_one(res.projected[0]));
    CHECK(res.support_ok);
    CHECK(res.vanishes);

    try {
        eta_projection(X2 - X1, lambda_lattice(2, {{{1, 0}, 0}}), {z3, z3});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("permute") != std::string::npos);
    }
    const auto two = PAdicNumber::from_int(Q, 2);
    CHECK_THROWS_AS(eta_projection(X2.scale(two) - X1, lam, {z3, z3}), Error);
    try {
        eta_projection(X2 - X1, lam, {z3, PAdicNumber::one(K)});
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::precondition);
    }
}
