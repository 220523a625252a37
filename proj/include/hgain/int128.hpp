#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "hgain/errors.hpp"

namespace hgain {

using i128 = __int128;
using u128 = unsigned __int128;

// Checked arithmetic. Every helper throws OverflowError instead of wrapping.

inline i128 checked_add(i128 a, i128 b) {
    i128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("int128 addition overflow");
    return r;
}

inline i128 checked_sub(i128 a, i128 b) {
    i128 r;
    if (__builtin_sub_overflow(a, b, &r)) throw OverflowError("int128 subtraction overflow");
    return r;
}

inline i128 checked_mul(i128 a, i128 b) {
    i128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("int128 multiplication overflow");
    return r;
}

inline u128 checked_add(u128 a, u128 b) {
    u128 r;
    if (__builtin_add_overflow(a, b, &r)) throw OverflowError("uint128 addition overflow");
    return r;
}

inline u128 checked_mul(u128 a, u128 b) {
    u128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw OverflowError("uint128 multiplication overflow");
    return r;
}

/// base^exp, throwing on overflow.
u128 checked_pow(u128 base, unsigned exp);

/// base^exp, or nullopt when it exceeds `limit`.
std::optional<u128> pow_bounded(u128 base, unsigned exp, u128 limit);

u128 gcd(u128 a, u128 b);

inline u128 abs_u128(i128 v) {
    return v < 0 ? u128(0) - u128(v) : u128(v);
}

std::string to_string(u128 v);
std::string to_string(i128 v);

/// Parses an optionally signed decimal integer; throws std::invalid_argument.
i128 parse_i128(const std::string& text);

}  // namespace hgain
