#include "padmm/experiment.hpp"

#include <json.hpp>

#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "padmm/dyncheck.hpp"
#include "padmm/parallel.hpp"

namespace padmm {

namespace {

using Json = nlohmann::ordered_json;

struct Out {
    std::vector<Json> records;
    std::ostringstream text;
    bool internal_failure = false;

    void add(Json j) { records.push_back(std::move(j)); }
};

std::string val(const RationalValuation& v) { return v.to_string(); }

Json int_json(const Int& x) {
    if (x.fits_slong_p()) return Json(x.get_si());
    return Json(x.get_str());
}

Json vec_json(const IntVec& v) {
    Json a = Json::array();
    for (const auto& x : v) a.push_back(int_json(x));
    return a;
}

Json mat_json(const IntMat& m) {
    Json a = Json::array();
    for (const auto& v : m) a.push_back(vec_json(v));
    return a;
}

std::string vec_text(const IntVec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i].get_str();
    return s + ")";
}

std::string spec_text(const GroupSpec& g) { return g.kind + (g.param.empty() ? "" : " " + g.param); }

FormalSubscheme config_subscheme(const ExperimentConfig& c, const FormalGroupPtr& F) {
    std::vector<TruncatedSeries> gens;
    for (const auto& g : c.generators) gens.push_back(parse_polynomial(F->structure(), F->dimension(), c.D, g));
    return FormalSubscheme::make(F, std::move(gens));
}

// ---- axioms, log/exp, height

void run_axioms(const ExperimentConfig& c, Out& out) {
    const auto s = config_field(c);
    out.text << "group  identity  commutativity  associativity  integrality  exp_log  log_additive  height\n";
    for (std::size_t i = 0; i < c.groups.size(); ++i) {
        const auto F = build_group(c.groups[i], s, c.D);
        const AxiomReport ax = check_axioms(*F);
        const auto X = TruncatedSeries::variable(s, 1, c.D, 0);
        const auto L = F->log(), E = F->exp();
        const bool exp_log = compose(E, {L}).equals(X) && compose(L, {E}).equals(X);
        const auto lhs = compose(L, {F->law()[0]});
        const auto rhs = L.remap(2, {0}) + L.remap(2, {1});
        const bool additive = lhs.equals(rhs);
        const HeightResult h = F->height();
        Json j;
        j["type"] = "group";
        j["index"] = i;
        j["group"] = spec_text(c.groups[i]);
        j["identity"] = ax.identity;
        j["commutativity"] = ax.commutativity;
        j["associativity"] = ax.associativity;
        j["integrality"] = ax.integrality;
        j["exp_log"] = exp_log;
        j["log_additive"] = additive;
        j["height"] = h.finite ? Json(h.height) : Json("inf");
        j["height_text"] = h.to_string();
        out.add(j);
        auto yn = [](bool b) { return b ? "pass" : "FAIL"; };
        out.text << spec_text(c.groups[i]) << "  " << yn(ax.identity) << "  " << yn(ax.commutativity) << "  "
                 << yn(ax.associativity) << "  " << yn(ax.integrality) << "  " << yn(exp_log) << "  " << yn(additive)
                 << "  " << h.to_string() << "\n";
    }
}

// ---- torsion table with a Newton polygon oracle

std::vector<Int> int_mul(const std::vector<Int>& a, const std::vector<Int>& b) {
    std::vector<Int> r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

std::vector<Int> int_compose(const std::vector<Int>& f, const std::vector<Int>& g) {
    std::vector<Int> r{f.back()};
    for (std::size_t k = f.size() - 1; k-- > 0;) {
        r = int_mul(r, g);
        r[0] += f[k];
    }
    return r;
}

// [p^r](X) as an integer polynomial, when the group has one.
std::optional<std::vector<Int>> iterate_division_polynomial(const GroupSpec& g, const FormalGroupLaw& F, long p,
                                                            int r) {
    if (g.kind == "multiplicative") {
        // (1 + X)^{p^r} - 1 from binomials.
        Int q = 1;
        for (int i = 0; i < r; ++i) q *= p;
        const long n = q.get_si();
        std::vector<Int> c(n + 1);
        Int b = 1;
        c[0] = 0;
        for (long k = 1; k <= n; ++k) {
            b = b * (n - k + 1) / k;
            c[k] = b;
        }
        return c;
    }
    if (!F.division_polynomial()) return std::nullopt;
    std::vector<Int> acc{0, 1};
    for (int i = 0; i < r; ++i) acc = int_compose(*F.division_polynomial(), acc);
    return acc;
}

void run_torsion_table(const ExperimentConfig& c, Out& out) {
    const auto s = config_field(c);
    const auto F = build_group(c.groups[0], s, c.D);
    const auto table = division_points(F, c.level);
    long cumulative = 0;
    std::vector<NewtonSegment> segs;
    const auto dp = iterate_division_polynomial(c.groups[0], *F, c.p, c.level);
    if (dp) {
        // Drop the root at 0.
        PolyK poly;
        for (std::size_t i = 1; i < dp->size(); ++i) poly.push_back(PAdicNumber::from_int(s, (*dp)[i]));
        segs = newton_polygon(poly);
    }
    out.text << "field " << table->field->describe() << "\nlevel  exact  total  valuations  newton\n";
    bool all_ok = true;
    for (int r = 0; r <= c.level; ++r) {
        const auto pts = table->exact_level(r);
        cumulative += static_cast<long>(pts.size());
        std::set<std::string> vals;
        RationalValuation v = RationalValuation::infinity();
        for (const auto& P : pts)
            if (!P.coords[0].is_zero()) {
                v = P.coords[0].valuation();
                vals.insert(val(v));
            }
        Json j;
        j["type"] = "level";
        j["level"] = r;
        j["exact"] = pts.size();
        j["total"] = cumulative;
        j["valuations"] = std::vector<std::string>(vals.begin(), vals.end());
        std::string oracle = "unavailable";
        if (dp && r >= 1) {
            bool ok = false;
            for (const auto& sgm : segs)
                if (vals.size() == 1 && sgm.root_valuation == v && sgm.length == static_cast<int>(pts.size())) ok = true;
            oracle = ok ? "agrees" : "DISAGREES";
            all_ok = all_ok && ok;
        } else if (r == 0) {
            oracle = "-";
        }
        j["newton"] = oracle;
        out.add(j);
        out.text << r << "  " << pts.size() << "  " << cumulative << "  ";
        for (const auto& x : vals) out.text << x << " ";
        out.text << " " << oracle << "\n";
    }
    Json sum;
    sum["type"] = "summary";
    sum["field"] = table->field->describe();
    sum["newton_oracle"] = dp ? Json(all_ok && segs.size() == static_cast<std::size_t>(c.level)) : Json("unavailable");
    out.add(sum);
}

// ---- Tate-Voloch scan with a direct-evaluation oracle

// sum c * prod x_j^{e_j}, monomial by monomial.
RationalValuation direct_distance(const std::vector<TruncatedSeries>& gens, const std::vector<PAdicNumber>& P) {
    const StructurePtr& K = P[0].structure();
    RationalValuation d = RationalValuation::infinity();
    for (const auto& g : gens) {
        PAdicNumber acc = PAdicNumber::zero(K);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.coeff(i).is_zero()) continue;
            PAdicNumber t = g.coeff(i).embed(K);
            const Exponent& e = g.index().exponent(i);
            for (std::size_t k = 0; k < e.size(); ++k)
                if (e[k]) t = t * P[k].pow(e[k]);
            acc = acc + t;
        }
        d = min(d, acc.is_zero() ? acc.precision() : acc.valuation());
    }
    return d >= membership_floor(K) ? RationalValuation::infinity() : d;
}

void scan_rows(const ScanReport& rep, Out& out) {
    for (const auto& r : rep.rows) {
        Json j;
        j["type"] = "row";
        j["level"] = r.level;
        j["torsion"] = r.torsion_count;
        j["members"] = r.member_count;
        j["near"] = r.near_count;
        j["min_gap"] = r.has_nonmember ? val(r.min_gap) : "-";
        out.add(j);
    }
    out.text << rep.to_text();
}

void run_scan(const ExperimentConfig& c, int threads, Out& out) {
    const auto F = build_ambient(c);
    const auto X = config_subscheme(c, F);
    const ScanReport rep = epsilon_scan(X, c.level, c.threshold, threads);
    scan_rows(rep, out);

    bool exact = true;
    for (const auto& g : X.generators) exact = exact && g.exact();
    Json o;
    o["type"] = "oracle";
    o["method"] = "direct evaluation of every generator at every torsion point";
    if (exact) {
        const auto table = division_points(F, c.level);
        const auto Xt = over_table(X, *table);
        std::vector<RationalValuation> d(table->points.size());
        parallel_for(d.size(), threads, [&](std::size_t i) { d[i] = direct_distance(Xt.generators, table->points[i].coords); });
        bool agree = true;
        for (const auto& row : rep.rows) {
            long members = 0;
            bool has = false;
            RationalValuation best;
            for (std::size_t i = 0; i < d.size(); ++i) {
                if (table->points[i].level > row.level) continue;
                if (d[i].is_infinite()) {
                    ++members;
                } else {
                    if (!has || d[i] > best) best = d[i];
                    has = true;
                }
            }
            agree = agree && members == row.member_count && has == row.has_nonmember && (!has || best == row.min_gap);
        }
        o["agrees"] = agree;
        out.text << "direct-evaluation oracle: " << (agree ? "agrees" : "DISAGREES") << "\n";
    } else {
        o["agrees"] = "unavailable";
    }
    out.add(o);
    Json s;
    s["type"] = "summary";
    const std::size_t L = rep.rows.size();
    const bool two = L >= 2;
    s["gap_stable"] = two && rep.rows[L - 1].has_nonmember == rep.rows[L - 2].has_nonmember &&
                      rep.rows[L - 1].min_gap == rep.rows[L - 2].min_gap;
    s["members_stable"] = two && rep.rows[L - 1].member_count == rep.rows[L - 2].member_count;
    Json keys = Json::array();
    for (const auto& P : rep.members) keys.push_back(P.key());
    s["members"] = keys;
    out.add(s);
}

// ---- covering step

void run_covering(const ExperimentConfig& c, int threads, Out& out) {
    const auto F = build_ambient(c);
    const auto X = config_subscheme(c, F);
    const CoveringReport rep = covering_step(X, c.r, c.level, threads);
    out.text << "covering step r = " << rep.r << ", scanned through level " << rep.scan_level << "\n";
    bool stable = true;
    for (const auto& piece : rep.pieces) {
        Json j;
        j["type"] = "piece";
        j["Q"] = piece.Q.key();
        j["members"] = piece.member_counts;
        out.add(j);
        out.text << "Q = " << piece.Q.key() << "  members per level:";
        for (long m : piece.member_counts) out.text << " " << m;
        out.text << "\n";
        const auto& mc = piece.member_counts;
        if (mc.size() >= 2 && mc[mc.size() - 1] != mc[mc.size() - 2]) stable = false;
    }
    Json s;
    s["type"] = "summary";
    s["pieces"] = rep.pieces.size();
    s["members_per_level"] = rep.members_per_level;
    s["uncovered"] = rep.uncovered.size();
    s["verified"] = rep.verified();
    s["piece_counts_stable"] = stable;
    out.add(s);
    out.text << "pieces " << rep.pieces.size() << ", uncovered " << rep.uncovered.size() << ", "
             << (rep.verified() ? "verified" : "NOT verified") << "\n";
}

// ---- dynamics

void run_dynamics(const ExperimentConfig& c, int threads, Out& out) {
    const auto s = config_field(c);
    const auto F = build_group(c.groups[0], s, c.D);
    const auto G = c.groups.size() > 1 ? build_group(c.groups[1], s, c.D) : F;
    const auto h = parse_polynomial(s, 1, c.D, *c.h);
    const auto rep = unlikely_intersection_scan(h, F, G, c.level, threads);
    const auto pre = preperiodic_points(F, c.m, c.level);
    Json pj;
    pj["type"] = "preperiodic";
    pj["m"] = c.m;
    pj["level"] = c.level;
    pj["points"] = pre.points.size();
    Json orbits = Json::array();
    for (const auto& P : pre.points) orbits.push_back({P.point.key(), P.preperiod, P.period});
    pj["orbits"] = orbits;
    pj["matches_division_points"] = pre.matches_division_points;
    out.add(pj);
    out.text << "preperiodic points of [" << c.m << "] through level " << c.level << ": " << pre.points.size()
             << (pre.matches_division_points ? " (equal to the division points)\n" : " (MISMATCH)\n");
    for (const auto& r : rep.rows) {
        Json j;
        j["type"] = "row";
        j["level"] = r.level;
        j["pairs"] = r.pairs;
        j["hits"] = r.hits;
        j["min_gap"] = r.has_gap ? val(r.min_gap) : "-";
        out.add(j);
    }
    Json v;
    v["type"] = "verdict";
    v["growth"] = rep.growth;
    v["homomorphism_checked"] = rep.homomorphism_checked;
    v["homomorphism"] = rep.homomorphism;
    v["gap_stable"] = rep.gap_stable;
    v["verdict"] = rep.verdict;
    out.add(v);
    out.text << rep.to_text();
}

// ---- Boxall descent

void run_boxall(const ExperimentConfig& c, Out& out) {
    const auto F = build_ambient(c);
    const auto table = division_points(F, c.level);
    long ok = 0, failed = 0;
    out.text << "descent r = " << c.r << " over the exact-level-" << c.level << " points\n";
    for (const auto& P : table->exact_level(c.level)) {
        Json j;
        j["type"] = "descent";
        j["point"] = P.key();
        try {
            const BoxallResult res = boxall_descent(F, P, c.r);
            const bool good = res.witness.level == c.r;
            j["witness"] = res.witness.key();
            j["witness_level"] = res.witness.level;
            j["u"] = res.g.u.get_str();
            j["by_search"] = res.by_search;
            j["ok"] = good;
            (good ? ok : failed)++;
            out.text << P.key() << "  u = " << res.g.u.get_str() << "  witness level " << res.witness.level
                     << (res.by_search ? " (search)" : "") << "\n";
        } catch (const Error& e) {
            j["ok"] = false;
            j["error"] = error_code_name(e.code());
            j["message"] = e.what();
            ++failed;
            if (e.code() == ErrorCode::internal_assertion) out.internal_failure = true;
            out.text << P.key() << "  FAILED [" << error_code_name(e.code()) << "] " << e.what() << "\n";
        }
        out.add(j);
    }
    Json s;
    s["type"] = "summary";
    s["points"] = ok + failed;
    s["ok"] = ok;
    s["failed"] = failed;
    out.add(s);
    out.text << ok << " ok, " << failed << " failed\n";
}

// ---- Galois invariance of distance

void run_galois(const ExperimentConfig& c, int threads, Out& out) {
    const auto F = build_ambient(c);
    const auto X = config_subscheme(c, F);
    const auto table = division_points(F, c.level);
    const auto Xt = over_table(X, *table);
    std::mt19937_64 rng(c.seed);
    Int q = 1;
    for (int i = 0; i < c.level; ++i) q *= c.p;
    const long pl = q.get_si();
    const int f = table->field->f();
    struct Sample {
        std::size_t index;
        GaloisElement g;
    };
    std::vector<Sample> samples;
    for (int k = 0; k < c.samples; ++k) {
        Sample s;
        s.index = static_cast<std::size_t>(rng() % table->points.size());
        long u = 1;
        if (pl > 1)
            do u = static_cast<long>(rng() % static_cast<std::uint64_t>(pl));
            while (u % c.p == 0);
        s.g.u = u;
        s.g.frobenius = f > 1 ? static_cast<int>(rng() % static_cast<std::uint64_t>(f)) : 0;
        samples.push_back(s);
    }
    std::vector<RationalValuation> before(samples.size()), after(samples.size());
    std::vector<std::string> image(samples.size());
    parallel_for(samples.size(), threads, [&](std::size_t k) {
        const auto& P = table->points[samples[k].index];
        const auto Q = galois_orbit(*table, P, samples[k].g);
        before[k] = distance(Xt, P.coords);
        after[k] = distance(Xt, Q.coords);
        image[k] = Q.key();
    });
    long invariant = 0;
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const bool same = before[k] == after[k];
        invariant += same;
        Json j;
        j["type"] = "sample";
        j["point"] = table->points[samples[k].index].key();
        j["u"] = samples[k].g.u.get_str();
        j["frobenius"] = samples[k].g.frobenius;
        j["image"] = image[k];
        j["distance"] = val(before[k]);
        j["image_distance"] = val(after[k]);
        j["invariant"] = same;
        out.add(j);
    }
    Json s;
    s["type"] = "summary";
    s["samples"] = samples.size();
    s["invariant"] = invariant;
    out.add(s);
    out.text << invariant << " of " << samples.size() << " sampled (point, Galois element) pairs keep their distance\n";
}

// ---- rigid suite

bool near_one(const PAdicNumber& x) {
    const PAdicNumber d = x - PAdicNumber::one(x.structure());
    return d.is_zero() || d.valuation() >= membership_floor(x.structure());
}

bool exact_order(const PAdicNumber& x, long m) {
    if (!near_one(x.pow(m))) return false;
    long r = m;
    for (long q = 2; q <= r; ++q) {
        if (r % q) continue;
        while (r % q == 0) r /= q;
        if (near_one(x.pow(m / q))) return false;
    }
    return true;
}

PAdicNumber signed_pow(const PAdicNumber& x, long k) {
    const PAdicNumber y = x.pow(k < 0 ? -k : k);
    return k < 0 ? y.inverse() : y;
}

void run_rigid(const ExperimentConfig& c, Out& out) {
    const auto Q = config_field(c);
    for (long o : c.orders) {
        const RootTable t = roots_of_unity({o}, 1, Q);
        bool orders_ok = true, frob_ok = true;
        long frob_checked = 0;
        for (const auto& z : t.roots) {
            orders_ok = orders_ok && exact_order(z.value, o);
            if (o % c.p != 0) {
                frob_ok = frob_ok && frobenius(z.value, 1).equals(z.value.pow(c.p));
                ++frob_checked;
            }
        }
        Json j;
        j["type"] = "roots";
        j["order"] = o;
        j["field"] = t.field->describe();
        j["count"] = t.roots.size();
        j["exact_orders"] = orders_ok;
        j["frobenius_checked"] = frob_checked;
        j["frobenius_is_pth_power"] = frob_ok;
        out.add(j);
        out.text << "roots of unity of order " << o << ": " << t.roots.size() << " in " << t.field->describe()
                 << ", exact orders " << (orders_ok ? "ok" : "FAIL") << ", Frobenius = p-th power on " << frob_checked
                 << " " << (frob_ok ? "ok" : "FAIL") << "\n";
    }
    std::optional<LambdaLattice> lam;
    if (!c.families.empty()) {
        lam = lambda_lattice(static_cast<int>(c.families[0].exponents.size()), c.families);
        Json j;
        j["type"] = "lambda";
        j["basis"] = mat_json(lam->basis);
        j["finite_stabilizer"] = lam->finite_stabilizer;
        j["normal"] = vec_json(lam->normal);
        out.add(j);
        out.text << "Lambda basis:";
        for (const auto& v : lam->basis) out.text << " " << vec_text(v);
        out.text << (lam->finite_stabilizer ? "  (finite stabilizer)" : "  normal c = " + vec_text(lam->normal)) << "\n";
    }
    if (!c.curve.empty()) {
        std::vector<std::vector<PAdicNumber>> pts;
        for (long t : c.curve_samples) {
            const auto x = PAdicNumber::from_int(Q, t), one = PAdicNumber::one(Q);
            pts.push_back({signed_pow(x, c.curve[0]) - one, signed_pow(x, c.curve[1]) - one});
        }
        const auto rel = subtorus_from_log(pts);
        Json j;
        j["type"] = "subtorus";
        j["curve"] = c.curve;
        j["found"] = rel.has_value();
        j["basis"] = rel ? mat_json(rel->basis) : Json::array();
        out.add(j);
        out.text << "log relations for (t^" << c.curve[0] << ", t^" << c.curve[1] << "): ";
        if (rel)
            for (const auto& v : rel->basis) out.text << vec_text(v) << " ";
        else
            out.text << "none";
        out.text << "\n";
    }
    if (c.rho) {
        require(lam.has_value(), ErrorCode::invalid_argument, "[rho] needs 'family' lines for the lattice");
        const int n = static_cast<int>(c.zeta_exponents.size());
        const auto w = roots_of_unity({c.zeta_order}, 1, Q).roots.at(0).value;
        std::vector<PAdicNumber> zeta;
        for (long e : c.zeta_exponents) zeta.push_back(signed_pow(w, e));
        const auto rho = parse_polynomial(Q, n, c.D, *c.rho);
        const EtaProjection ep = eta_projection(rho, *lam, zeta);
        Json j;
        j["type"] = "eta";
        j["eta"] = ep.eta.key();
        Json proj = Json::array();
        for (const auto& x : ep.projected) proj.push_back(x.key());
        j["projected"] = proj;
        j["support_ok"] = ep.support_ok;
        j["value_valuation"] = val(ep.value_valuation);
        j["vanishes"] = ep.vanishes;
        out.add(j);
        out.text << "eta projection: support " << (ep.support_ok ? "in Lambda" : "NOT in Lambda") << ", rho_bar "
                 << (ep.vanishes ? "vanishes" : "does not vanish") << " at the projected point (v = "
                 << val(ep.value_valuation) << ")\n";
    }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& c, int threads) {
    require(threads >= 1, ErrorCode::invalid_argument, "threads must be >= 1");
    Out out;
    Json head;
    head["schema"] = "padmm-report";
    head["version"] = kReportSchemaVersion;
    head["kind"] = c.kind;
    head["p"] = c.p;
    head["N"] = c.N;
    head["D"] = c.D;
    head["seed"] = c.seed;
    head["config"] = emit_config(c);
    out.add(head);
    out.text << "padmm report: " << c.kind << " (p = " << c.p << ", N = " << c.N << ", D = " << c.D << ")\n";
    if (c.kind == "axioms")
        run_axioms(c, out);
    else if (c.kind == "torsion-table")
        run_torsion_table(c, out);
    else if (c.kind == "tate-voloch-scan")
        run_scan(c, threads, out);
    else if (c.kind == "covering")
        run_covering(c, threads, out);
    else if (c.kind == "dynamics")
        run_dynamics(c, threads, out);
    else if (c.kind == "boxall")
        run_boxall(c, out);
    else if (c.kind == "galois-invariance")
        run_galois(c, threads, out);
    else if (c.kind == "rigid-subtorus")
        run_rigid(c, out);
    else
        fail(ErrorCode::invalid_argument, "unknown experiment kind '" + c.kind + "'");
    ExperimentResult res;
    res.text = out.text.str();
    for (const auto& r : out.records) res.jsonl += r.dump() + "\n";
    res.internal_failure = out.internal_failure;
    return res;
}

}  // namespace padmm
