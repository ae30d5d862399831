#include "padmm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

namespace padmm {

const std::vector<std::string>& experiment_kinds() {
    static const std::vector<std::string> kinds = {"axioms",   "torsion-table", "tate-voloch-scan", "covering",
                                                   "dynamics", "rigid-subtorus", "boxall",          "galois-invariance"};
    return kinds;
}

namespace {

[[noreturn]] void fail_at(int line, int col, const std::string& msg) {
    fail(ErrorCode::parse, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + msg);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

bool is_prime(long p) {
    if (p < 2) return false;
    for (long d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

struct Pos {
    int line = 0, col = 0;
};

// Whitespace-separated integers.
std::vector<long> parse_ints(const std::string& text, Pos at) {
    std::vector<long> out;
    std::size_t i = 0;
    while (i < text.size()) {
        if (std::isspace(static_cast<unsigned char>(text[i])) || text[i] == ',') {
            ++i;
            continue;
        }
        long v = 0;
        const auto res = std::from_chars(text.data() + i, text.data() + text.size(), v);
        if (res.ec != std::errc() || (res.ptr != text.data() + text.size() && !std::isspace(*res.ptr) && *res.ptr != ','))
            fail_at(at.line, at.col + static_cast<int>(i), "expected an integer");
        out.push_back(v);
        i = res.ptr - text.data();
    }
    return out;
}

long parse_int(const std::string& text, Pos at) {
    const auto v = parse_ints(text, at);
    if (v.size() != 1) fail_at(at.line, at.col, "expected one integer");
    return v[0];
}

// Polynomial lexer/parser over one source line.
class PolyParser {
public:
    PolyParser(const std::string& text, int line, int n, int D) : t_(text), line_(line), n_(n), D_(D) {}

    // Adds the terms of this line into `acc`.
    void parse(std::vector<std::pair<Exponent, std::pair<Int, Int>>>& acc) {
        skip();
        if (i_ == t_.size()) return;
        bool first = true;
        while (i_ < t_.size()) {
            Int sign = 1;
            if (peek() == '+' || peek() == '-') {
                sign = peek() == '-' ? -1 : 1;
                ++i_;
                skip();
            } else if (!first) {
                err("expected '+' or '-'");
            }
            first = false;
            auto term = parse_term();
            term.second.first *= sign;
            acc.push_back(std::move(term));
            skip();
        }
    }

private:
    char peek() const { return i_ < t_.size() ? t_[i_] : '\0'; }
    void skip() {
        while (i_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[i_]))) ++i_;
    }
    [[noreturn]] void err(const std::string& msg) const { fail_at(line_, static_cast<int>(i_) + 1, msg); }

    Int number() {
        const std::size_t a = i_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
        if (a == i_) err("expected a number");
        return Int(t_.substr(a, i_ - a));
    }

    std::pair<Exponent, std::pair<Int, Int>> parse_term() {
        Exponent ex(n_, 0);
        Int num = 1, den = 1;
        bool any = false;
        while (true) {
            skip();
            const char c = peek();
            if (std::isdigit(static_cast<unsigned char>(c))) {
                num *= number();
                skip();
                if (peek() == '/') {
                    ++i_;
                    skip();
                    const Int d = number();
                    if (d == 0) err("division by zero");
                    den *= d;
                }
            } else if (c == 'X') {
                ++i_;
                int var = 1;
                if (std::isdigit(static_cast<unsigned char>(peek()))) var = static_cast<int>(number().get_si());
                if (var < 1 || var > n_) err("variable X" + std::to_string(var) + " outside X1..X" + std::to_string(n_));
                int power = 1;
                skip();
                if (peek() == '^') {
                    ++i_;
                    skip();
                    power = static_cast<int>(number().get_si());
                }
                ex[var - 1] += power;
            } else {
                err(any ? "expected a factor after '*'" : "expected a number or a variable");
            }
            any = true;
            skip();
            if (peek() == '*') {
                ++i_;
                continue;
            }
            if (peek() == 'X') continue;  // implicit product, as in 3X
            break;
        }
        int deg = 0;
        for (int e : ex) deg += e;
        if (deg > D_) err("term degree " + std::to_string(deg) + " exceeds the cap D = " + std::to_string(D_));
        return {ex, {num, den}};
    }

    std::string t_;
    int line_, n_, D_;
    std::size_t i_ = 0;
};

long group_height(const GroupSpec& g) {
    if (g.kind == "additive") return 0;
    if (g.kind == "honda") return g.param.empty() ? 2 : std::stol(g.param);
    return 1;
}

bool uses_torsion(const std::string& kind) {
    return kind != "axioms" && kind != "rigid-subtorus";
}

}  // namespace

TruncatedSeries parse_polynomial(const StructurePtr& s, int n, int D, const SeriesSpec& spec) {
    std::vector<std::pair<Exponent, std::pair<Int, Int>>> terms;
    for (std::size_t k = 0; k < spec.lines.size(); ++k) {
        const int line = k < spec.line_numbers.size() ? spec.line_numbers[k] : 1;
        PolyParser(spec.lines[k], line, n, D).parse(terms);
    }
    require(!terms.empty(), ErrorCode::parse,
            "line " + std::to_string(spec.line_numbers.empty() ? 1 : spec.line_numbers[0]) + ": empty series");
    TruncatedSeries f(s, n, D);
    for (const auto& [ex, q] : terms) f.set(ex, f.coeff(ex) + PAdicNumber::from_rational(s, q.first, q.second));
    return f;
}

StructurePtr config_field(const ExperimentConfig& c) { return Structure::rationals(c.p, c.N); }

FormalGroupPtr build_group(const GroupSpec& g, const StructurePtr& s, int D) {
    const long p = s->prime();
    if (g.kind == "multiplicative") return FormalGroupLaw::multiplicative(s, D);
    if (g.kind == "additive") return FormalGroupLaw::additive(s, D);
    if (g.kind == "lubin-tate") {
        SeriesSpec spec;
        spec.lines = {g.param.empty() ? std::to_string(p) + "X + X^" + std::to_string(p) : g.param};
        return FormalGroupLaw::lubin_tate(s, D, parse_polynomial(s, 1, D, spec));
    }
    if (g.kind == "honda") {
        const long h = group_height(g);
        std::vector<PAdicNumber> c(D + 1, PAdicNumber::zero(s));
        Int q = 1, pk = 1;
        int k = 0;
        for (; q <= D; ++k) {
            c[q.get_si()] = PAdicNumber::from_rational(s, 1, pk);
            for (long i = 0; i < h; ++i) q *= p;
            pk *= p;
        }
        auto ell = TruncatedSeries::univariate(s, D, c);
        ell.set_tail(RationalValuation(-k));
        return FormalGroupLaw::from_log(s, D, ell);
    }
    fail(ErrorCode::invalid_argument, "unknown group kind '" + g.kind + "'");
}

FormalGroupPtr build_ambient(const ExperimentConfig& c) {
    const auto s = config_field(c);
    std::vector<FormalGroupPtr> f;
    for (const auto& g : c.groups) f.push_back(build_group(g, s, c.D));
    require(!f.empty(), ErrorCode::invalid_argument, "no group given");
    return f.size() == 1 ? f[0] : FormalGroupLaw::product(f);
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig c;
    std::map<std::string, Pos> where;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    SeriesSpec* block = nullptr;
    std::string block_name;
    Pos block_pos;
    static const std::vector<std::string> repeatable = {"group", "family"};
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const auto h = line.find('#'); h != std::string::npos) line = line.substr(0, h);
        const std::string t = trim(line);
        if (t.empty()) continue;
        const int indent = static_cast<int>(line.find_first_not_of(" \t")) + 1;
        if (t.front() == '[') {
            if (t.back() != ']') fail_at(lineno, indent, "unterminated section header");
            const std::string name = t.substr(1, t.size() - 2);
            if (name == "end") {
                if (!block) fail_at(lineno, indent, "[end] without an open section");
                if (block->lines.empty()) fail_at(block_pos.line, block_pos.col, "empty [" + block_name + "] section");
                block = nullptr;
                continue;
            }
            if (block) fail_at(lineno, indent, "section [" + block_name + "] is not closed");
            block_name = name;
            block_pos = {lineno, indent};
            if (name == "generator") {
                c.generators.emplace_back();
                block = &c.generators.back();
            } else if (name == "h" || name == "rho") {
                auto& slot = name == "h" ? c.h : c.rho;
                if (slot) fail_at(lineno, indent, "duplicate section [" + name + "]");
                slot.emplace();
                block = &*slot;
            } else {
                fail_at(lineno, indent, "unknown section [" + name + "]");
            }
            continue;
        }
        if (block) {
            block->lines.push_back(line);
            block->line_numbers.push_back(lineno);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail_at(lineno, indent, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string rest = line.substr(eq + 1);
        const auto off = rest.find_first_not_of(" \t");
        const std::string value = trim(rest);
        const Pos at{lineno, static_cast<int>(eq + 2 + (off == std::string::npos ? 0 : off))};
        if (value.empty()) fail_at(at.line, at.col, "missing value for '" + key + "'");
        if (where.count(key) && std::find(repeatable.begin(), repeatable.end(), key) == repeatable.end())
            fail_at(lineno, indent, "duplicate key '" + key + "'");
        where[key] = at;
        if (key == "kind") {
            c.kind = value;
        } else if (key == "p") {
            c.p = parse_int(value, at);
        } else if (key == "N") {
            c.N = static_cast<int>(parse_int(value, at));
        } else if (key == "D") {
            c.D = static_cast<int>(parse_int(value, at));
        } else if (key == "group") {
            const auto sp = value.find_first_of(" \t");
            GroupSpec g{value.substr(0, sp), sp == std::string::npos ? "" : trim(value.substr(sp))};
            if (g.kind != "multiplicative" && g.kind != "additive" && g.kind != "lubin-tate" && g.kind != "honda")
                fail_at(at.line, at.col, "unknown group kind '" + g.kind + "'");
            if ((g.kind == "multiplicative" || g.kind == "additive") && !g.param.empty())
                fail_at(at.line, at.col, g.kind + " takes no parameter");
            if (g.kind == "honda" && !g.param.empty()) {
                const long h = parse_int(g.param, at);
                if (h < 1 || h > 4) fail_at(at.line, at.col, "honda height must be in 1..4");
            }
            c.groups.push_back(std::move(g));
        } else if (key == "level") {
            c.level = static_cast<int>(parse_int(value, at));
        } else if (key == "threshold") {
            try {
                c.threshold = RationalValuation::parse(value);
            } catch (const Error& e) {
                fail_at(at.line, at.col, e.what());
            }
        } else if (key == "r") {
            c.r = static_cast<int>(parse_int(value, at));
        } else if (key == "m") {
            c.m = parse_int(value, at);
        } else if (key == "samples") {
            c.samples = static_cast<int>(parse_int(value, at));
        } else if (key == "seed") {
            const long s = parse_int(value, at);
            if (s < 0) fail_at(at.line, at.col, "seed must be >= 0");
            c.seed = static_cast<std::uint64_t>(s);
        } else if (key == "orders") {
            c.orders = parse_ints(value, at);
        } else if (key == "family") {
            const auto slash = value.find('/');
            StabilizerFamily f;
            f.exponents = parse_ints(value.substr(0, slash), at);
            if (slash != std::string::npos) f.order = parse_int(value.substr(slash + 1), at);
            if (f.exponents.empty()) fail_at(at.line, at.col, "family needs exponents");
            c.families.push_back(std::move(f));
        } else if (key == "curve") {
            c.curve = parse_ints(value, at);
            if (c.curve.size() != 2) fail_at(at.line, at.col, "curve takes two exponents");
        } else if (key == "curve-samples") {
            c.curve_samples = parse_ints(value, at);
        } else if (key == "zeta") {
            const auto colon = value.find(':');
            if (colon == std::string::npos) fail_at(at.line, at.col, "zeta is 'order : exponents'");
            c.zeta_order = parse_int(value.substr(0, colon), at);
            c.zeta_exponents = parse_ints(value.substr(colon + 1), at);
        } else {
            fail_at(lineno, indent, "unknown key '" + key + "'");
        }
    }
    if (block) fail_at(block_pos.line, block_pos.col, "section [" + block_name + "] is not closed");

    // Semantic checks.
    auto pos = [&](const std::string& k) { return where.count(k) ? where[k] : Pos{1, 1}; };
    if (c.kind.empty()) fail_at(1, 1, "missing key 'kind'");
    const auto& kinds = experiment_kinds();
    if (std::find(kinds.begin(), kinds.end(), c.kind) == kinds.end())
        fail_at(pos("kind").line, pos("kind").col, "unknown experiment kind '" + c.kind + "'");
    if (!where.count("p")) fail_at(1, 1, "missing key 'p'");
    if (!is_prime(c.p)) fail_at(pos("p").line, pos("p").col, "p = " + std::to_string(c.p) + " is not prime");
    if (c.p > kMaxPrime) fail_at(pos("p").line, pos("p").col, "p exceeds the cap " + std::to_string(kMaxPrime));
    if (c.N < 4 || c.N > kMaxPrecision)
        fail_at(pos("N").line, pos("N").col, "N must be in 4.." + std::to_string(kMaxPrecision));
    if (c.D < 2 || c.D > kMaxCap) fail_at(pos("D").line, pos("D").col, "D must be in 2.." + std::to_string(kMaxCap));
    if (c.level < 0) fail_at(pos("level").line, pos("level").col, "level must be >= 0");
    if (c.r < 1) fail_at(pos("r").line, pos("r").col, "r must be >= 1");
    if (c.samples < 1 || c.samples > 100000) fail_at(pos("samples").line, pos("samples").col, "samples out of range");

    const bool needs_groups = c.kind != "rigid-subtorus";
    if (needs_groups && c.groups.empty()) fail_at(1, 1, "missing key 'group'");
    if ((c.kind == "torsion-table" || c.kind == "boxall") && c.groups.size() != 1)
        fail_at(pos("group").line, pos("group").col, c.kind + " takes exactly one group");
    if (c.kind == "dynamics" && c.groups.size() > 2)
        fail_at(pos("group").line, pos("group").col, "dynamics takes one or two groups (F, G)");
    if (uses_torsion(c.kind)) {
        for (const auto& g : c.groups) {
            long count = 1;
            for (long i = 0; i < group_height(g) * c.level; ++i) {
                count *= c.p;
                if (count > kTorsionBudget)
                    fail_at(pos("level").line, pos("level").col,
                            "torsion budget: more than " + std::to_string(kTorsionBudget) + " points per factor");
            }
        }
    }
    const StructurePtr s = config_field(c);
    for (const auto& g : c.groups)
        if (g.kind == "lubin-tate") {
            if (g.param.empty() && c.p > c.D) fail_at(pos("group").line, pos("group").col, "pX + X^p exceeds D");
            if (!g.param.empty()) {
                SeriesSpec spec{{g.param}, {pos("group").line}};
                parse_polynomial(s, 1, c.D, spec);
            }
        }
    const bool needs_generators = c.kind == "tate-voloch-scan" || c.kind == "covering" || c.kind == "galois-invariance";
    if (needs_generators && c.generators.empty()) fail_at(1, 1, "missing [generator] section");
    for (const auto& g : c.generators) parse_polynomial(s, static_cast<int>(c.groups.size()), c.D, g);
    if (c.kind == "dynamics") {
        if (!c.h) fail_at(1, 1, "missing [h] section");
        parse_polynomial(s, 1, c.D, *c.h);
        if (c.m < 2) fail_at(pos("m").line, pos("m").col, "m must be >= 2");
    }
    if (c.rho) {
        if (c.zeta_exponents.size() < 2) fail_at(c.rho->line_numbers[0], 1, "[rho] needs 'zeta' with >= 2 exponents");
        parse_polynomial(s, static_cast<int>(c.zeta_exponents.size()), c.D, *c.rho);
    }
    if (!c.zeta_exponents.empty() && c.zeta_order < 1) fail_at(pos("zeta").line, pos("zeta").col, "zeta order must be >= 1");
    for (long o : c.orders)
        if (o < 1) fail_at(pos("orders").line, pos("orders").col, "orders must be positive");
    if (!c.curve.empty() && c.curve_samples.size() < 2)
        fail_at(pos("curve").line, pos("curve").col, "curve needs at least two curve-samples");
    return c;
}

std::string emit_config(const ExperimentConfig& c) {
    std::ostringstream os;
    auto ints = [&](const std::vector<long>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
        return s;
    };
    os << "kind = " << c.kind << "\n";
    os << "p = " << c.p << "\nN = " << c.N << "\nD = " << c.D << "\n";
    for (const auto& g : c.groups) os << "group = " << g.kind << (g.param.empty() ? "" : " " + g.param) << "\n";
    os << "level = " << c.level << "\nthreshold = " << c.threshold.to_string() << "\nr = " << c.r << "\nm = " << c.m
       << "\nsamples = " << c.samples << "\nseed = " << c.seed << "\n";
    if (!c.orders.empty()) os << "orders = " << ints(c.orders) << "\n";
    for (const auto& f : c.families) os << "family = " << ints(f.exponents) << " / " << f.order << "\n";
    if (!c.curve.empty()) os << "curve = " << ints(c.curve) << "\n";
    if (!c.curve_samples.empty()) os << "curve-samples = " << ints(c.curve_samples) << "\n";
    if (!c.zeta_exponents.empty()) os << "zeta = " << c.zeta_order << " : " << ints(c.zeta_exponents) << "\n";
    auto block = [&](const char* name, const SeriesSpec& s) {
        os << "[" << name << "]\n";
        for (const auto& l : s.lines) os << trim(l) << "\n";
        os << "[end]\n";
    };
    for (const auto& g : c.generators) block("generator", g);
    if (c.h) block("h", *c.h);
    if (c.rho) block("rho", *c.rho);
    return os.str();
}

}  // namespace padmm
