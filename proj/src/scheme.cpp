#include "padmm/scheme.hpp"

#include <sstream>

#include "padmm/parallel.hpp"

namespace padmm {

FormalSubscheme FormalSubscheme::make(FormalGroupPtr ambient, std::vector<TruncatedSeries> generators) {
    require(ambient != nullptr, ErrorCode::invalid_argument, "null ambient group");
    require(!generators.empty(), ErrorCode::invalid_argument, "a subscheme needs at least one generator");
    for (const auto& g : generators)
        require(g.variables() == ambient->dimension(), ErrorCode::invalid_argument,
                "generator has " + std::to_string(g.variables()) + " variables, ambient dimension is " +
                    std::to_string(ambient->dimension()));
    return {std::move(ambient), std::move(generators)};
}

bool FormalSubscheme::through_identity() const {
    for (const auto& g : generators)
        if (!g.constant_term().is_zero()) return false;
    return true;
}

RationalValuation membership_floor(const StructurePtr& s, int margin) {
    return RationalValuation(s->precision() - margin);
}

RationalValuation distance(const FormalSubscheme& X, const std::vector<PAdicNumber>& P, int margin) {
    require(!X.generators.empty(), ErrorCode::invalid_argument, "a subscheme needs at least one generator");
    require(!P.empty(), ErrorCode::invalid_argument, "empty point");
    RationalValuation d = RationalValuation::infinity();
    for (const auto& g : X.generators) {
        const Evaluation ev = evaluate(g, P);
        const RationalValuation v = ev.value.is_zero() ? ev.value.precision() : ev.value.valuation();
        d = min(d, min(v, ev.tail_bound));
    }
    if (d >= membership_floor(P[0].structure(), margin)) return RationalValuation::infinity();
    return d;
}

namespace {

// The larger of two structures when one embeds in the other.
StructurePtr common_field(const StructurePtr& a, const StructurePtr& b) {
    if (a->is_subfield_of(*b)) return b;
    if (b->is_subfield_of(*a)) return a;
    fail(ErrorCode::invalid_argument, "no common field for " + a->describe() + " and " + b->describe());
}

}  // namespace

FormalSubscheme translate(const FormalSubscheme& X, const std::vector<PAdicNumber>& Q) {
    const FormalGroupLaw& F = *X.ambient;
    const int n = F.dimension();
    require(static_cast<int>(Q.size()) == n, ErrorCode::invalid_argument, "translation point dimension mismatch");
    StructurePtr K = Q[0].structure();
    for (const auto& g : X.generators) K = common_field(K, g.structure());
    std::vector<PAdicNumber> q;
    for (const auto& c : Q) {
        q.push_back(c.embed(K));
        require(c.is_zero() || c.valuation() > RationalValuation(0), ErrorCode::domain,
                "translation point must have positive coordinate valuations");
    }
    const int D = X.generators[0].cap();
    std::vector<TruncatedSeries> args;
    for (int k = 0; k < n; ++k) args.push_back(TruncatedSeries::variable(K, n, D, k));
    for (int k = 0; k < n; ++k) args.push_back(TruncatedSeries::constant(K, n, D, q[k]));
    std::vector<TruncatedSeries> shifted;  // F(X, Q)
    for (const auto& comp : F.law()) shifted.push_back(compose_shifted(comp.lift_to(K).with_cap(D), args));
    FormalSubscheme T{X.ambient, {}};
    for (const auto& g : X.generators) T.generators.push_back(compose_shifted(g.lift_to(K), shifted));
    return T;
}

FormalSubscheme over_table(const FormalSubscheme& X, const TorsionTable& table) {
    FormalSubscheme Y{X.ambient, {}};
    for (const auto& g : X.generators) {
        const StructurePtr& s = g.structure();
        if (s->is_subfield_of(*table.field)) {
            Y.generators.push_back(g.lift_to(table.field));
            continue;
        }
        const int from = table.tower ? table.tower->level_of(s) : -1;
        require(from >= 0 && from <= table.field_level, ErrorCode::invalid_argument,
                "generator coefficients do not live in the torsion tower");
        auto tower = table.tower;
        const int to = table.field_level;
        Y.generators.push_back(
            g.map_coefficients(table.field, [&](const PAdicNumber& x) { return tower->map(x, from, to); }));
    }
    return Y;
}

namespace {

std::vector<RationalValuation> distances(const FormalSubscheme& X, const TorsionTable& t, int threads) {
    std::vector<RationalValuation> d(t.points.size());
    parallel_for(t.points.size(), threads, [&](std::size_t i) { d[i] = distance(X, t.points[i].coords); });
    return d;
}

}  // namespace

std::vector<TorsionPoint> stabilizer_probe(const FormalSubscheme& X, int r, int threads) {
    const auto table = division_points(X.ambient, r);
    const FormalSubscheme Xt = over_table(X, *table);
    const auto d = distances(Xt, *table, threads);
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].is_infinite()) members.push_back(i);
    std::vector<char> keep(table->points.size(), 0);
    parallel_for(table->points.size(), threads, [&](std::size_t z) {
        const auto& zeta = table->points[z];
        for (std::size_t m : members) {
            const auto sum = X.ambient->add(table->points[m].coords, zeta.coords);
            if (!d[table->locate(sum.coords, sum.tail_bound)].is_infinite()) return;
        }
        keep[z] = 1;
    });
    std::vector<TorsionPoint> out;
    for (std::size_t i = 0; i < keep.size(); ++i)
        if (keep[i]) out.push_back(table->points[i]);
    return out;
}

ScanReport epsilon_scan(const FormalSubscheme& X, int max_level, const RationalValuation& threshold, int threads) {
    require(max_level >= 0, ErrorCode::invalid_argument, "scan level must be >= 0");
    const auto table = division_points(X.ambient, max_level);
    const FormalSubscheme Xt = over_table(X, *table);
    const auto d = distances(Xt, *table, threads);
    ScanReport rep;
    rep.threshold = threshold;
    for (int l = 0; l <= max_level; ++l) {
        ScanRow row;
        row.level = l;
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (table->points[i].level > l) continue;
            ++row.torsion_count;
            if (d[i].is_infinite()) {
                ++row.member_count;
                continue;
            }
            if (!row.has_nonmember || d[i] > row.min_gap) row.min_gap = d[i];
            row.has_nonmember = true;
            if (d[i] > threshold) ++row.near_count;
        }
        rep.rows.push_back(row);
    }
    for (std::size_t i = 0; i < d.size(); ++i)
        if (d[i].is_infinite()) rep.members.push_back(table->points[i]);
    return rep;
}

std::string ScanReport::to_text() const {
    std::ostringstream os;
    os << "threshold v_eps = " << threshold.to_string() << "\n";
    os << "level  torsion  members  near  min_gap\n";
    for (const auto& r : rows)
        os << r.level << "  " << r.torsion_count << "  " << r.member_count << "  " << r.near_count << "  "
           << (r.has_nonmember ? r.min_gap.to_string() : "-") << "\n";
    return os.str();
}

CoveringReport covering_step(const FormalSubscheme& X, int r, int scan_level, int threads) {
    require(r >= 1, ErrorCode::invalid_argument, "covering step needs r >= 1");
    require(scan_level >= r, ErrorCode::invalid_argument, "scan level must be >= r");
    require(X.through_identity(), ErrorCode::precondition, "covering step needs X to pass through the identity");
    for (const auto& z : stabilizer_probe(X, r, threads))
        require(z.level <= r - 1, ErrorCode::precondition,
                "stabilizer probe is not contained in F[p^" + std::to_string(r - 1) + "]: zeta = " + z.key());
    const auto low = division_points(X.ambient, r);
    const auto table = division_points(X.ambient, scan_level);
    const FormalSubscheme Xs = over_table(X, *table);
    const auto dX = distances(Xs, *table, threads);

    CoveringReport rep;
    rep.r = r;
    rep.scan_level = scan_level;
    auto per_level = [&](const std::vector<char>& member) {
        std::vector<long> counts(scan_level + 1, 0);
        for (std::size_t i = 0; i < member.size(); ++i)
            if (member[i])
                for (int l = table->points[i].level; l <= scan_level; ++l) ++counts[l];
        return counts;
    };
    std::vector<char> onX(dX.size());
    for (std::size_t i = 0; i < dX.size(); ++i) onX[i] = dX[i].is_infinite();
    rep.members_per_level = per_level(onX);

    std::vector<char> covered(dX.size(), 0);
    for (const auto& Q : low->exact_level(r)) {
        CoveringPiece piece;
        piece.Q = low->lift(Q, *table);
        const FormalSubscheme T = translate(Xs, piece.Q.coords);
        piece.intersection = Xs;
        for (const auto& g : T.generators) piece.intersection.generators.push_back(g);
        const auto d = distances(piece.intersection, *table, threads);
        std::vector<char> on(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            on[i] = d[i].is_infinite();
            if (on[i]) covered[i] = 1;
        }
        piece.member_counts = per_level(on);
        rep.pieces.push_back(std::move(piece));
    }
    for (std::size_t i = 0; i < dX.size(); ++i)
        if (onX[i] && table->points[i].level > r - 1 && !covered[i]) rep.uncovered.push_back(table->points[i]);
    return rep;
}

}  // namespace padmm
