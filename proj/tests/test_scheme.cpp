#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "padmm/scheme.hpp"

using namespace padmm;

namespace {

struct Setup {
    StructurePtr Q;
    FormalGroupPtr M, M2;
    int D;
    TruncatedSeries Y1, Y2;
};

Setup setup(long p, int N = 24, int D = 16) {
    Setup s;
    s.Q = Structure::rationals(p, N);
    s.D = D;
    s.M = FormalGroupLaw::multiplicative(s.Q, D);
    s.M2 = FormalGroupLaw::product({s.M, s.M});
    s.Y1 = TruncatedSeries::variable(s.Q, 2, D, 0);
    s.Y2 = TruncatedSeries::variable(s.Q, 2, D, 1);
    return s;
}

// Closest approach of a non-member, by direct evaluation of Y1 + Y1^2 - Y2
// (or Y1 - Y2) at every pair of level-l torsion of the multiplicative group.
RationalValuation brute_gap(const TorsionTable& t1, int level, bool graph, long& members) {
    std::vector<PAdicNumber> xs;
    for (const auto& P : t1.points)
        if (P.level <= level) xs.push_back(P.coords[0]);
    RationalValuation best(-1000);
    members = 0;
    const RationalValuation floor = membership_floor(t1.field);
    for (const auto& a : xs)
        for (const auto& b : xs) {
            const PAdicNumber v = graph ? a + a * a - b : a - b;
            const RationalValuation d = v.is_zero() ? v.precision() : v.valuation();
            if (d >= floor)
                ++members;
            else
                best = max(best, d);
        }
    return best;
}

}  // namespace

TEST_CASE("distance") {
    auto s = setup(3);
    auto X = FormalSubscheme::make(s.M2, {s.Y1 - s.Y2});
    auto t = division_points(s.M, 1);
    const auto z = t->exact_level(1).front().coords[0];
    CHECK(distance(X, {z, z}).is_infinite());
    CHECK(distance(X, {z, PAdicNumber::zero(z.structure())}) == RationalValuation(1, 2));
    CHECK_THROWS_AS(FormalSubscheme::make(s.M2, {}), Error);
}

TEST_CASE("translates") {
    auto s = setup(3, 16, 8);
    auto Y = TruncatedSeries::variable(s.Q, 1, s.D, 0);
    const auto a = PAdicNumber::from_int(s.Q, 6), b = PAdicNumber::from_int(s.Q, 9);
    auto X = FormalSubscheme::make(s.M, {Y - TruncatedSeries::constant(s.Q, 1, s.D, a)});
    auto T = translate(X, {b});
    auto expect = Y.scale(PAdicNumber::one(s.Q) + b) + TruncatedSeries::constant(s.Q, 1, s.D, b - a);
    CHECK(T.generators[0].equals(expect));
    auto T0 = translate(X, {PAdicNumber::zero(s.Q)});
    CHECK(T0.generators[0].equals(X.generators[0]));
    CHECK_THROWS_AS(translate(X, {PAdicNumber::one(s.Q)}), Error);

    // Membership transport on torsion of the square.
    auto G = FormalSubscheme::make(s.M2, {s.Y1 + s.Y1 * s.Y1 - s.Y2});
    auto t = division_points(s.M2, 1);
    const auto tab = over_table(G, *t);
    for (std::size_t i = 0; i < t->points.size(); i += 2) {
        const auto& Qp = t->points[i];
        auto TQ = translate(tab, Qp.coords);
        for (const auto& P : t->points) {
            auto sum = s.M2->add(P.coords, Qp.coords).coords;
            CHECK(distance(TQ, P.coords) == distance(tab, sum));
        }
    }
    // Translation is an action on member sets.
    const auto& A = t->points[3];
    const auto& B = t->points[5];
    auto AB = torsion_add(*t, A, B);
    auto TT = translate(translate(tab, A.coords), B.coords);
    auto TAB = translate(tab, AB.coords);
    for (const auto& P : t->points) CHECK(distance(TT, P.coords).is_infinite() == distance(TAB, P.coords).is_infinite());
}

TEST_CASE("stabilizer probe") {
    auto s = setup(3);
    auto diag = FormalSubscheme::make(s.M2, {s.Y1 - s.Y2});
    auto st = stabilizer_probe(diag, 1);
    CHECK(st.size() == 3);
    for (const auto& z : st) CHECK(z.coords[0].equals(z.coords[1]));
    auto first = FormalSubscheme::make(s.M2, {s.Y1});
    auto st1 = stabilizer_probe(first, 1);
    CHECK(st1.size() == 3);
    for (const auto& z : st1) CHECK(z.coords[0].is_zero());
    auto origin = FormalSubscheme::make(s.M2, {s.Y1, s.Y2});
    auto st0 = stabilizer_probe(origin, 2);
    REQUIRE(st0.size() == 1);
    CHECK(st0[0].is_zero());
    // Closed under the group law.
    auto t = division_points(s.M2, 1);
    for (const auto& a : st)
        for (const auto& b : st) {
            auto c = torsion_add(*t, a, b);
            bool in = false;
            for (const auto& z : st) in = in || z == c;
            CHECK(in);
        }
}

TEST_CASE("epsilon scan against brute force") {
    auto s = setup(3);
    auto t1 = division_points(s.M, 3);
    auto diag = FormalSubscheme::make(s.M2, {s.Y1 - s.Y2});
    auto rep = epsilon_scan(diag, 2, RationalValuation(1, 3));
    REQUIRE(rep.rows.size() == 3);
    CHECK(rep.rows[0].member_count == 1);
    CHECK(rep.rows[1].member_count == 3);
    CHECK(rep.rows[2].member_count == 9);
    CHECK(rep.rows[2].torsion_count == 81);
    long members = 0;
    CHECK(rep.rows[2].min_gap == brute_gap(*t1, 2, false, members));
    CHECK(members == 9);
    CHECK(rep.rows[2].min_gap == RationalValuation(1, 2));

    auto graph = FormalSubscheme::make(s.M2, {s.Y1 + s.Y1 * s.Y1 - s.Y2});
    auto g3 = epsilon_scan(graph, 3, RationalValuation(1, 3), 4);
    for (int l = 1; l <= 3; ++l) {
        long m = 0;
        CHECK(g3.rows[l].min_gap == brute_gap(*t1, l, true, m));
        CHECK(g3.rows[l].member_count == m);
    }
    CHECK(g3.rows[2].min_gap == g3.rows[3].min_gap);
    CHECK(g3.rows[2].member_count == g3.rows[3].member_count);
    auto none = epsilon_scan(graph, 2, RationalValuation::infinity());
    CHECK(none.rows[2].near_count == 0);
}

TEST_CASE("covering step") {
    auto s = setup(3);
    auto graph = FormalSubscheme::make(s.M2, {s.Y1 + s.Y1 * s.Y1 - s.Y2});
    auto rep = covering_step(graph, 1, 2);
    CHECK(rep.pieces.size() == 8);
    CHECK(rep.verified());
    auto rep3 = covering_step(graph, 1, 3, 4);
    CHECK(rep3.verified());
    for (std::size_t i = 0; i < rep3.pieces.size(); ++i)
        CHECK(rep3.pieces[i].member_counts[3] == rep3.pieces[i].member_counts[2]);
    auto diag = FormalSubscheme::make(s.M2, {s.Y1 - s.Y2});
    try {
        covering_step(diag, 1, 2);
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::precondition);
    }
}
