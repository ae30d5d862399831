#include "padmm/valuation.hpp"

#include <numeric>

#include "padmm/error.hpp"

namespace padmm {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::invalid_argument: return "invalid_argument";
        case ErrorCode::precondition: return "precondition";
        case ErrorCode::domain: return "domain";
        case ErrorCode::budget: return "budget";
        case ErrorCode::parse: return "parse";
        case ErrorCode::precision: return "precision";
        case ErrorCode::internal_assertion: return "internal_assertion";
    }
    return "unknown";
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

}  // namespace

RationalValuation::RationalValuation(std::int64_t num, std::int64_t den) {
    require(den != 0, ErrorCode::invalid_argument, "valuation with zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num_ = num / (g == 0 ? 1 : g);
    den_ = den / (g == 0 ? 1 : g);
}

std::int64_t RationalValuation::floor_scaled(std::int64_t scale) const {
    require(!infinite_, ErrorCode::domain, "floor of infinite valuation");
    return floor_div(num_ * scale, den_);
}

std::int64_t RationalValuation::ceil_scaled(std::int64_t scale) const {
    require(!infinite_, ErrorCode::domain, "ceil of infinite valuation");
    return -floor_div(-num_ * scale, den_);
}

RationalValuation RationalValuation::operator+(const RationalValuation& o) const {
    if (infinite_ || o.infinite_) return infinity();
    return RationalValuation(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
}

RationalValuation RationalValuation::operator-() const {
    require(!infinite_, ErrorCode::domain, "negating infinite valuation");
    return RationalValuation(-num_, den_);
}

RationalValuation RationalValuation::operator*(std::int64_t k) const {
    if (infinite_) {
        require(k > 0, ErrorCode::domain, "scaling infinite valuation by non-positive integer");
        return infinity();
    }
    return RationalValuation(num_ * k, den_);
}

std::strong_ordering RationalValuation::operator<=>(const RationalValuation& o) const {
    if (infinite_ || o.infinite_) {
        if (infinite_ && o.infinite_) return std::strong_ordering::equal;
        return infinite_ ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    return (num_ * o.den_) <=> (o.num_ * den_);
}

std::string RationalValuation::to_string() const {
    if (infinite_) return "inf";
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
}

RationalValuation RationalValuation::parse(const std::string& text) {
    if (text == "inf" || text == "+inf") return infinity();
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const std::int64_t n = std::stoll(text, &used);
            require(used == text.size(), ErrorCode::parse, "bad valuation '" + text + "'");
            return RationalValuation(n);
        }
        const std::string a = text.substr(0, slash), b = text.substr(slash + 1);
        const std::int64_t n = std::stoll(a, &used);
        require(used == a.size(), ErrorCode::parse, "bad valuation '" + text + "'");
        const std::int64_t d = std::stoll(b, &used);
        require(used == b.size() && d > 0, ErrorCode::parse, "bad valuation '" + text + "'");
        return RationalValuation(n, d);
    } catch (const std::logic_error&) {
        fail(ErrorCode::parse, "bad valuation '" + text + "'");
    }
}

}  // namespace padmm
