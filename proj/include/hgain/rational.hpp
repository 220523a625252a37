#pragma once

#include <compare>
#include <iosfwd>
#include <string>

#include "hgain/int128.hpp"

namespace hgain {

/// Exact reduced fraction over signed 128-bit integers.
///
/// The denominator is always positive and coprime to the numerator. All
/// arithmetic is overflow-checked and throws OverflowError rather than
/// wrapping; comparison never overflows.
class Rational {
public:
    constexpr Rational() = default;
    Rational(i128 numerator, i128 denominator = 1);

    static Rational from_int(std::int64_t v) { return Rational(i128(v)); }

    /// Parses "num/den" or a plain integer.
    static Rational parse(const std::string& text);

    i128 numerator() const { return num_; }
    i128 denominator() const { return den_; }

    bool is_zero() const { return num_ == 0; }
    bool is_negative() const { return num_ < 0; }

    double to_double() const;

    /// Renders as "num/den"; integers keep the "/1" suffix.
    std::string str() const;

    Rational operator-() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) = default;
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b);

private:
    struct Reduced {};
    Rational(i128 numerator, i128 denominator, Reduced) : num_(numerator), den_(denominator) {}

    i128 num_ = 0;
    i128 den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace hgain
