#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace wreathlab {

using BigNat = boost::multiprecision::cpp_int;

/// Result of evaluating a bound formula: a value, Overflow (beyond the digit
/// cap), or Undefined (a measured component was Unreached).
struct BoundResult {
    enum class Kind { Value, Overflow, Undefined } kind = Kind::Undefined;
    BigNat value;

    static BoundResult of(BigNat v) { return {Kind::Value, std::move(v)}; }
    static BoundResult overflow() { return {Kind::Overflow, 0}; }
    static BoundResult undefined() { return {Kind::Undefined, 0}; }

    bool is_value() const { return kind == Kind::Value; }
    std::string str() const {
        switch (kind) {
            case Kind::Value: return value.str();
            case Kind::Overflow: return "overflow";
            case Kind::Undefined: return "-";
        }
        return "-";
    }
};

/// base^exp, Overflow if the result would exceed digit_cap decimal digits.
inline BoundResult pow_checked(const BigNat& base, const BigNat& exp, std::uint64_t digit_cap) {
    if (base == 0) return BoundResult::of(exp == 0 ? 1 : 0);
    if (base == 1) return BoundResult::of(1);
    // bits(result) ~= exp * bits(base); digits ~= bits * 0.302
    std::uint64_t base_bits = boost::multiprecision::msb(base) + 1;
    BigNat bits_estimate = exp * base_bits;
    if (bits_estimate > BigNat(digit_cap) * 4) return BoundResult::overflow();
    auto e = static_cast<std::uint64_t>(exp);
    BigNat acc = 1, b = base;
    while (e) {
        if (e & 1) acc *= b;
        e >>= 1;
        if (e) b *= b;
    }
    if (acc.str().size() > digit_cap) return BoundResult::overflow();
    return BoundResult::of(std::move(acc));
}

} // namespace wreathlab
