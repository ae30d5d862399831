#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "padmm/rigid.hpp"

namespace padmm {

constexpr int kMaxPrecision = 64;
constexpr int kMaxCap = 32;
constexpr long kMaxPrime = 97;

/// kind: multiplicative, additive, lubin-tate (param: polynomial in X,
/// default pX + X^p), honda (param: height, default 2).
struct GroupSpec {
    std::string kind;
    std::string param;
};

/// Polynomial text as written, one entry per source line.
struct SeriesSpec {
    std::vector<std::string> lines;
    std::vector<int> line_numbers;
};

struct ExperimentConfig {
    std::string kind;
    long p = 0;
    int N = 24;
    int D = 16;
    std::vector<GroupSpec> groups;
    std::vector<SeriesSpec> generators;
    std::optional<SeriesSpec> h;
    std::optional<SeriesSpec> rho;
    int level = 1;
    RationalValuation threshold = RationalValuation::infinity();
    int r = 1;
    long m = 2;
    int samples = 200;
    std::uint64_t seed = 1;
    std::vector<long> orders;
    std::vector<StabilizerFamily> families;
    std::vector<long> curve;          // exponents (a, b): points (t^a - 1, t^b - 1)
    std::vector<long> curve_samples;  // values of t
    long zeta_order = 0;
    std::vector<long> zeta_exponents;
};

const std::vector<std::string>& experiment_kinds();

/// Flat "key = value" lines, '#' comments, and [generator] / [h] / [rho]
/// blocks closed by [end]. Errors carry line and column.
ExperimentConfig parse_config(const std::string& text);
std::string emit_config(const ExperimentConfig& c);

/// Polynomial such as "X1 + X1^2 - 1/3*X2^3" in variables X1..Xn (X = X1).
TruncatedSeries parse_polynomial(const StructurePtr& s, int n, int D, const SeriesSpec& spec);

StructurePtr config_field(const ExperimentConfig& c);
FormalGroupPtr build_group(const GroupSpec& g, const StructurePtr& s, int D);
FormalGroupPtr build_ambient(const ExperimentConfig& c);

}  // namespace padmm
