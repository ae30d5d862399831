#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace padmm {

/// Exact p-adic valuation normalized so that v(p) = 1.
///
/// Values live in (1/e)Z for the ramification index e of the field they were
/// computed in, plus a +infinity marker that stands for "zero to working
/// precision". Larger valuation means closer to zero; distances throughout the
/// library are reported this way.
class RationalValuation {
public:
    constexpr RationalValuation() = default;
    RationalValuation(std::int64_t num, std::int64_t den = 1);

    static RationalValuation infinity() {
        RationalValuation v;
        v.infinite_ = true;
        return v;
    }

    bool is_infinite() const { return infinite_; }
    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    /// Floor of value * scale, for finite values.
    std::int64_t floor_scaled(std::int64_t scale) const;
    std::int64_t ceil_scaled(std::int64_t scale) const;

    RationalValuation operator+(const RationalValuation& o) const;
    RationalValuation operator-() const;
    RationalValuation operator-(const RationalValuation& o) const { return *this + (-o); }
    RationalValuation operator*(std::int64_t k) const;

    std::strong_ordering operator<=>(const RationalValuation& o) const;
    bool operator==(const RationalValuation& o) const { return (*this <=> o) == 0; }

    /// "inf", "3", or "-1/6".
    std::string to_string() const;
    static RationalValuation parse(const std::string& text);

private:
    bool infinite_ = false;
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

inline RationalValuation min(const RationalValuation& a, const RationalValuation& b) { return b < a ? b : a; }
inline RationalValuation max(const RationalValuation& a, const RationalValuation& b) { return a < b ? b : a; }

}  // namespace padmm
