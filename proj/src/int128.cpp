#include "hgain/int128.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace hgain {

u128 checked_pow(u128 base, unsigned exp) {
    u128 result = 1;
    for (unsigned e = 0; e < exp; ++e) result = checked_mul(result, base);
    return result;
}

std::optional<u128> pow_bounded(u128 base, unsigned exp, u128 limit) {
    u128 result = 1;
    for (unsigned e = 0; e < exp; ++e) {
        if (base != 0 && result > limit / base) return std::nullopt;
        result *= base;
    }
    if (result > limit) return std::nullopt;
    return result;
}

u128 gcd(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out.push_back(char('0' + int(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string to_string(i128 v) {
    if (v < 0) return "-" + to_string(abs_u128(v));
    return to_string(u128(v));
}

i128 parse_i128(const std::string& text) {
    std::size_t pos = 0;
    bool negative = false;
    if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
        negative = text[pos] == '-';
        ++pos;
    }
    if (pos == text.size()) throw std::invalid_argument("not an integer: '" + text + "'");
    constexpr u128 kMaxMagnitude = u128(std::numeric_limits<i128>::max()) + 1;
    u128 magnitude = 0;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (c < '0' || c > '9') throw std::invalid_argument("not an integer: '" + text + "'");
        if (magnitude > (kMaxMagnitude - unsigned(c - '0')) / 10)
            throw OverflowError("integer literal exceeds 128 bits: '" + text + "'");
        magnitude = magnitude * 10 + unsigned(c - '0');
    }
    if (!negative && magnitude == kMaxMagnitude)
        throw OverflowError("integer literal exceeds 128 bits: '" + text + "'");
    return negative ? i128(u128(0) - magnitude) : i128(magnitude);
}

}  // namespace hgain
