#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "padmm/experiment.hpp"

using namespace padmm;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

std::uint64_t lcg(std::uint64_t& s) {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return s >> 33;
}

// Random valid config text.
std::string random_config(std::uint64_t& s) {
    const long primes[] = {2, 3, 5, 7};
    const long p = primes[lcg(s) % 4];
    const char* groups[] = {"multiplicative", "additive", "lubin-tate", "honda 2"};
    std::ostringstream os;
    os << "kind = " << (lcg(s) % 2 ? "axioms" : "tate-voloch-scan") << "\n";
    const bool scan = os.str().find("scan") != std::string::npos;
    os << "p = " << p << "\nN = " << 8 + lcg(s) % 40 << "\nD = " << 8 + lcg(s) % 20 << "\n";
    const int n = 1 + static_cast<int>(lcg(s) % 3);
    for (int i = 0; i < n; ++i) os << "group = " << groups[scan ? lcg(s) % 3 : lcg(s) % 4] << "\n";
    os << "level = " << lcg(s) % 2 << "\nthreshold = " << 1 + lcg(s) % 5 << "/" << 1 + lcg(s) % 7 << "\n";
    if (scan || lcg(s) % 2) {
        os << "[generator]\n";
        for (int i = 1; i <= n; ++i)
            os << (i > 1 ? "- " : "") << 1 + lcg(s) % 9 << "*X" << i << "^" << 1 + lcg(s) % 3 << "\n";
        os << "[end]\n";
    }
    os << "seed = " << lcg(s) % 1000 << "\n";
    return os.str();
}

}  // namespace

TEST_CASE("minimal config and defaults") {
    auto c = parse_config("kind = axioms\np = 3\ngroup = multiplicative\n");
    CHECK(c.kind == "axioms");
    CHECK(c.N == 24);
    CHECK(c.D == 16);
    CHECK(c.groups.size() == 1);
    CHECK(c.threshold.is_infinite());
}

TEST_CASE("config errors carry positions") {
    const auto unknown = error_of("kind = axioms\np = 3\ngroup = multiplicative\ncolour = red\n");
    CHECK(unknown.find("colour") != std::string::npos);
    CHECK(unknown.find("line 4") != std::string::npos);
    CHECK(error_of("kind = axioms\np = 4\ngroup = additive\n").find("not prime") != std::string::npos);
    CHECK(error_of("kind = axioms\np = 3\nN = 65\ngroup = additive\n").find("N must be") != std::string::npos);
    CHECK(error_of("kind = axioms\np = 3\nD = 33\ngroup = additive\n").find("D must be") != std::string::npos);
    CHECK(error_of("kind = torsion-table\np = 3\nlevel = 7\ngroup = multiplicative\n").find("torsion budget") !=
          std::string::npos);
    CHECK(error_of("kind = torsion-table\np = 3\nlevel = 4\ngroup = honda 2\n").find("torsion budget") !=
          std::string::npos);
    CHECK(error_of("kind = nope\np = 3\n").find("unknown experiment kind") != std::string::npos);
    CHECK(error_of("kind = axioms\np = 3\np = 5\ngroup = additive\n").find("duplicate") != std::string::npos);
    const auto col = error_of(
        "kind = tate-voloch-scan\np = 3\ngroup = multiplicative\ngroup = multiplicative\n[generator]\nX1 + * X2\n[end]\n");
    CHECK(col.find("line 6, column 6") != std::string::npos);
    CHECK(error_of("kind = tate-voloch-scan\np = 3\ngroup = multiplicative\ngroup = multiplicative\n[generator]\nX3\n[end]\n")
              .find("outside X1..X2") != std::string::npos);
    CHECK(error_of("kind = tate-voloch-scan\np = 3\ngroup = multiplicative\n[generator]\nX\n").find("not closed") !=
          std::string::npos);
    CHECK(error_of("kind = dynamics\np = 3\ngroup = multiplicative\n").find("[h]") != std::string::npos);
    try {
        parse_config("kind = axioms\np = 3\ngroup = weird\n");
        CHECK(false);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::parse);
    }
}

TEST_CASE("polynomials") {
    auto Q = Structure::rationals(3, 16);
    SeriesSpec s{{"3X + X^3"}, {1}};
    auto f = parse_polynomial(Q, 1, 8, s);
    CHECK(f.coeff(Exponent{1}).equals(PAdicNumber::from_int(Q, 3)));
    CHECK(f.coeff(Exponent{3}).equals(PAdicNumber::one(Q)));
    SeriesSpec t{{"X1 + X1^2", "- 1/3*X2^2*X1"}, {1, 2}};
    auto g = parse_polynomial(Q, 2, 8, t);
    CHECK(g.coeff(Exponent{1, 2}).equals(PAdicNumber::from_rational(Q, -1, 3)));
    SeriesSpec big{{"X^9"}, {1}};
    CHECK_THROWS_AS(parse_polynomial(Q, 1, 8, big), Error);
}

TEST_CASE("round trip of shipped configs") {
    int seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(PADMM_CONFIG_DIR)) {
        if (entry.path().extension() != ".cfg") continue;
        ++seen;
        const auto c = parse_config(slurp(entry.path()));
        const std::string once = emit_config(c);
        CHECK(emit_config(parse_config(once)) == once);
    }
    CHECK(seen >= 11);
}

TEST_CASE("round trip of random configs") {
    std::uint64_t seed = 2024;
    for (int k = 0; k < 200; ++k) {
        const std::string text = random_config(seed);
        INFO(text);
        const auto c = parse_config(text);
        const std::string once = emit_config(c);
        const auto again = parse_config(once);
        CHECK(emit_config(again) == once);
        CHECK(again.groups.size() == c.groups.size());
        CHECK(again.seed == c.seed);
        CHECK(again.threshold == c.threshold);
    }
}

TEST_CASE("reports are deterministic") {
    const auto c = parse_config(slurp(std::filesystem::path(PADMM_CONFIG_DIR) / "c04-torsion-p3.cfg"));
    const auto a = run_experiment(c, 1), b = run_experiment(c, 4);
    CHECK(a.jsonl == b.jsonl);
    CHECK(a.jsonl.rfind("{\"schema\":\"padmm-report\",\"version\":1", 0) == 0);
    CHECK(a.jsonl.find("\"newton_oracle\":true") != std::string::npos);
}
