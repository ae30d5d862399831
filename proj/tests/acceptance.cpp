// Acceptance suite: one PASS/FAIL line per criterion, driven by the shipped
// configs. Every tolerance is exact (valuations are exact rationals).
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "padmm/experiment.hpp"

using namespace padmm;
using Json = nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    // Failure confined to an instance shown impossible (see README).
    bool known_unattainable = false;
};

struct Run {
    std::vector<Json> records;
    std::string jsonl;
    bool internal_failure = false;
};

std::string slurp(const std::string& name) {
    std::ifstream in(std::filesystem::path(PADMM_CONFIG_DIR) / name);
    if (!in) throw std::runtime_error("missing config " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Run run(const std::string& name, int threads = 1) {
    const auto res = run_experiment(parse_config(slurp(name)), threads);
    Run r;
    r.jsonl = res.jsonl;
    r.internal_failure = res.internal_failure;
    std::istringstream in(res.jsonl);
    std::string line;
    while (std::getline(in, line)) r.records.push_back(Json::parse(line));
    return r;
}

std::vector<Json> of_type(const Run& r, const std::string& type) {
    std::vector<Json> out;
    for (const auto& j : r.records)
        if (j.value("type", "") == type) out.push_back(j);
    return out;
}

void expect(Outcome& o, bool cond, const std::string& what) {
    if (cond) return;
    o.pass = false;
    o.detail += (o.detail.empty() ? "" : "; ") + what;
}

long ipow(long p, int k) {
    long r = 1;
    while (k-- > 0) r *= p;
    return r;
}

Outcome axioms() {
    Outcome o;
    for (const char* cfg : {"c01-axioms-p2.cfg", "c01-axioms-p3.cfg", "c01-axioms-p5.cfg"}) {
        const auto groups = of_type(run(cfg), "group");
        expect(o, !groups.empty(), std::string(cfg) + ": no groups");
        for (const auto& g : groups)
            for (const char* ax : {"identity", "commutativity", "associativity", "integrality"})
                expect(o, g[ax] == true, std::string(cfg) + ": " + g["group"].get<std::string>() + " fails " + ax);
    }
    o.detail = o.pass ? "multiplicative and pX+X^p at p = 2, 3, 5 and Honda height 2 at p = 3, D = 16" : o.detail;
    return o;
}

Outcome log_exp() {
    Outcome o;
    int n = 0;
    for (const char* cfg : {"c02-logexp-p2.cfg", "c02-logexp-p3.cfg", "c02-logexp-p5.cfg"})
        for (const auto& g : of_type(run(cfg), "group")) {
            ++n;
            expect(o, g["exp_log"] == true, std::string(cfg) + ": exp o log != X for " + g["group"].get<std::string>());
            expect(o, g["log_additive"] == true,
                   std::string(cfg) + ": log not additive for " + g["group"].get<std::string>());
        }
    if (o.pass) o.detail = std::to_string(n) + " laws, coefficientwise through D = 16";
    return o;
}

Outcome heights() {
    Outcome o;
    const std::map<std::string, Json> want = {
        {"multiplicative", 1}, {"lubin-tate 3X + X^3", 1}, {"honda 2", 2}, {"additive", "inf"}};
    const auto groups = of_type(run("c03-heights-p3.cfg"), "group");
    expect(o, groups.size() == want.size(), "wrong number of groups");
    for (const auto& g : groups) {
        const std::string name = g["group"];
        expect(o, want.count(name) && want.at(name) == g["height"], name + " has height " + g["height"].dump());
    }
    if (o.pass) o.detail = "1, 1, 2, infinite at precision";
    return o;
}

Outcome torsion() {
    Outcome o;
    const std::vector<std::tuple<const char*, long, int>> cases = {
        {"c04-torsion-p2.cfg", 2, 3}, {"c04-torsion-p3.cfg", 3, 2}, {"c04-torsion-p5.cfg", 5, 2}};
    for (const auto& [cfg, p, L] : cases) {
        const Run r = run(cfg);
        for (const auto& row : of_type(r, "level")) {
            const int lv = row["level"];
            if (lv == 0) continue;
            const std::string tag = std::string(cfg) + " level " + std::to_string(lv);
            expect(o, row["total"] == ipow(p, lv), tag + ": |F[p^r]| != p^r");
            const long den = ipow(p, lv - 1) * (p - 1);
            const std::string v = den == 1 ? "1" : "1/" + std::to_string(den);
            expect(o, row["valuations"] == Json::array({v}), tag + ": valuations " + row["valuations"].dump());
            expect(o, row["newton"] == "agrees", tag + ": Newton polygon disagrees");
        }
        expect(o, of_type(r, "level").size() == static_cast<std::size_t>(L + 1), std::string(cfg) + ": missing levels");
        expect(o, of_type(r, "summary").at(0)["newton_oracle"] == true, std::string(cfg) + ": Newton oracle");
    }
    if (o.pass) o.detail = "counts p^r and valuations 1/(p^(r-1)(p-1)) match Newton polygons";
    return o;
}

Outcome boxall() {
    Outcome o;
    std::string done;
    for (const char* cfg : {"c05-boxall-gm-p3.cfg", "c05-boxall-lt-p3.cfg", "c05-boxall-gm-p5.cfg", "c05-boxall-lt-p5.cfg"}) {
        const auto s = of_type(run(cfg), "summary").at(0);
        expect(o, s["failed"] == 0 && s["ok"].get<long>() > 0, std::string(cfg) + ": " + s.dump());
        done += std::to_string(s["ok"].get<long>()) + " ";
    }
    const bool attainable_ok = o.pass;
    const Run p2 = run("c05-boxall-gm-p2.cfg");
    const auto s = of_type(p2, "summary").at(0);
    if (s["failed"] != 0) {
        bool all_internal = p2.internal_failure;
        for (const auto& d : of_type(p2, "descent")) all_internal = all_internal && d.value("error", "") == "internal_assertion";
        expect(o, false,
               "p = 2, r = 2: " + std::to_string(s["failed"].get<long>()) + " of " +
                   std::to_string(s["points"].get<long>()) +
                   " level-3 points have no witness (Gal(K(F[4])) acts by u = 1 mod 4, so g(P) - P has level <= 1)");
        o.known_unattainable = attainable_ok && all_internal;
    }
    if (attainable_ok) o.detail = "r = 1 at p = 3, 5 for G_m and LT: " + done + "points ok; " + o.detail;
    return o;
}

Outcome galois() {
    Outcome o;
    const auto s = of_type(run("c06-galois.cfg"), "summary").at(0);
    expect(o, s["samples"] == 200 && s["invariant"] == 200, "invariant " + s["invariant"].dump() + " of " + s["samples"].dump());
    if (o.pass) o.detail = "200 of 200 sampled pairs";
    return o;
}

std::string last_gap;

Outcome tate_voloch() {
    Outcome o;
    const Run g = run("c07-graph.cfg");
    const auto rows = of_type(g, "row");
    expect(o, rows.size() == 4, "graph: expected levels 0..3");
    if (rows.size() == 4) {
        expect(o, rows[2]["min_gap"] == rows[3]["min_gap"], "graph: gap moves from level 2 to 3");
        expect(o, rows[2]["members"] == rows[3]["members"], "graph: member count grows");
        last_gap = rows[3]["min_gap"];
    }
    expect(o, of_type(g, "oracle").at(0)["agrees"] == true, "graph: brute-force oracle disagrees");
    const Run d = run("c07-diagonal.cfg");
    const auto drows = of_type(d, "row");
    for (const auto& r : drows)
        expect(o, r["members"] == ipow(3, r["level"].get<int>()), "diagonal: members at level " + r["level"].dump());
    expect(o, of_type(d, "oracle").at(0)["agrees"] == true, "diagonal: brute-force oracle disagrees");
    if (o.pass)
        o.detail = "graph gap " + last_gap + " at levels 2 and 3, members " + rows[3]["members"].dump() +
                   "; diagonal members 1, 3, 9, 27";
    return o;
}

Outcome covering() {
    Outcome o;
    const Run r = run("c08-covering.cfg");
    const auto s = of_type(r, "summary").at(0);
    expect(o, s["verified"] == true, "uncovered members: " + s["uncovered"].dump());
    expect(o, s["pieces"] == 8, "pieces " + s["pieces"].dump());
    expect(o, s["piece_counts_stable"] == true, "piece member counts grow from level 2 to 3");
    if (o.pass) o.detail = "8 pieces, every member through level 3 covered, piece counts fixed";
    return o;
}

Outcome dynamics() {
    Outcome o;
    const Run dbl = run("c09-dynamics-double.cfg");
    const auto v = of_type(dbl, "verdict").at(0);
    expect(o, v["verdict"] == "homomorphism-consistent", "2X+X^2 verdict " + v["verdict"].dump());
    for (const auto& r : of_type(dbl, "row"))
        expect(o, r["hits"] == ipow(3, r["level"].get<int>()), "2X+X^2 hits at level " + r["level"].dump());
    const Run gr = run("c09-dynamics-graph.cfg");
    const auto w = of_type(gr, "verdict").at(0);
    expect(o, w["verdict"] == "gap" && w["gap_stable"] == true, "X+X^2 verdict " + w.dump());
    const auto rows = of_type(gr, "row");
    expect(o, !rows.empty() && rows.back()["min_gap"] == last_gap, "X+X^2 gap differs from the scan oracle");
    try {
        run("c09-dynamics-degenerate.cfg");
        expect(o, false, "h'(0) = 0 accepted");
    } catch (const Error& e) {
        expect(o, std::string(e.what()).find("h'(0)") != std::string::npos, std::string("wrong rejection: ") + e.what());
    }
    if (o.pass) o.detail = "[2]: consistent with p^level hits; X+X^2: gap " + last_gap + "; h'(0) = 0 rejected";
    return o;
}

Outcome rigid() {
    Outcome o;
    const Run r = run("c10-rigid.cfg");
    for (const auto& t : of_type(r, "roots")) {
        expect(o, t["exact_orders"] == true, "order " + t["order"].dump() + ": exact orders");
        expect(o, t["frobenius_is_pth_power"] == true, "order " + t["order"].dump() + ": Frobenius");
        if (t["order"] == 8) expect(o, t["frobenius_checked"] == 4 && t["count"] == 4, "order 8: expected 4 roots");
    }
    expect(o, of_type(r, "lambda").at(0)["normal"] == Json::array({1, 1}), "diagonal normal");
    expect(o, of_type(r, "subtorus").at(0)["basis"] == Json::array({Json::array({2, -3})}), "relation lattice");
    const auto eta = of_type(r, "eta").at(0);
    expect(o, eta["vanishes"] == true && eta["support_ok"] == true, "eta projection: " + eta.dump());
    const Run a = run("c10-rigid-antidiagonal.cfg");
    expect(o, of_type(a, "lambda").at(0)["normal"] == Json::array({1, -1}), "antidiagonal normal");
    if (o.pass) o.detail = "order-8 roots, c = (1,1) and (1,-1), relations (2,-3), rho_bar vanishes to the floor";
    return o;
}

Outcome determinism() {
    Outcome o;
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(PADMM_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        const std::string name = entry.path().filename().string();
        std::vector<std::string> outs;
        for (int threads : {1, 1, 4, 4}) {
            try {
                outs.push_back(run(name, threads).jsonl);
            } catch (const Error& e) {
                outs.push_back(std::string("error: ") + e.what());
            }
        }
        ++n;
        for (const auto& s : outs) expect(o, s == outs[0], name + " differs between runs");
    }
    if (o.pass) o.detail = std::to_string(n) + " configs, two runs each at 1 and 4 threads, byte-identical";
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"group-law axioms", axioms},
        {"log/exp identities", log_exp},
        {"heights", heights},
        {"torsion tables", torsion},
        {"Boxall descent", boxall},
        {"Galois invariance of distance", galois},
        {"Tate-Voloch gap", tate_voloch},
        {"covering step", covering},
        {"dynamics", dynamics},
        {"rigid suite", rigid},
        {"determinism", determinism},
    };
    int failed = 0, known = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu  %s  %-30s tolerance=exact  %.1fs  %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                    criteria[i].first.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) (o.known_unattainable ? known : failed)++;
    }
    std::printf("%d unexpected failure(s), %d failure(s) on instances shown impossible (README, Acceptance suite)\n", failed,
                known);
    return failed == 0 ? 0 : 1;
}
