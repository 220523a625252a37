#include "hgain/rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace hgain {

namespace {

constexpr i128 kMinI128 = std::numeric_limits<i128>::min();

std::strong_ordering reverse(std::strong_ordering ord) { return 0 <=> ord; }

// Compares the nonnegative fractions a/b and c/d by continued-fraction
// expansion, so no products are formed.
std::strong_ordering compare_nonneg(u128 a, u128 b, u128 c, u128 d) {
    bool flipped = false;
    for (;;) {
        u128 qa = a / b;
        u128 qc = c / d;
        if (qa != qc) {
            auto ord = qa <=> qc;
            return flipped ? reverse(ord) : ord;
        }
        u128 ra = a % b;
        u128 rc = c % d;
        if (ra == 0 || rc == 0) {
            auto ord = ra == rc ? std::strong_ordering::equal
                       : ra == 0 ? std::strong_ordering::less
                                 : std::strong_ordering::greater;
            return flipped ? reverse(ord) : ord;
        }
        // ra/b vs rc/d has the opposite order of b/ra vs d/rc.
        u128 next_a = b, next_b = ra, next_c = d, next_d = rc;
        a = next_a;
        b = next_b;
        c = next_c;
        d = next_d;
        flipped = !flipped;
    }
}

// Builds num/den from magnitudes and a sign, reducing first.
Rational make_signed(bool negative, u128 num, u128 den) {
    u128 g = gcd(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr u128 kMaxPositive = u128(std::numeric_limits<i128>::max());
    if (den > kMaxPositive || num > kMaxPositive) throw OverflowError("rational exceeds 128 bits");
    i128 n = i128(num);
    return Rational(negative ? -n : n, i128(den));
}

}  // namespace

Rational::Rational(i128 numerator, i128 denominator) {
    if (denominator == 0) throw std::domain_error("rational with zero denominator");
    if (numerator == kMinI128 || denominator == kMinI128) throw OverflowError("rational exceeds 128 bits");
    bool negative = (numerator < 0) != (denominator < 0);
    u128 n = abs_u128(numerator);
    u128 d = abs_u128(denominator);
    u128 g = gcd(n, d);
    n /= g;
    d /= g;
    num_ = negative ? -i128(n) : i128(n);
    den_ = i128(d);
}

Rational Rational::parse(const std::string& text) {
    auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(parse_i128(text));
    return Rational(parse_i128(text.substr(0, slash)), parse_i128(text.substr(slash + 1)));
}

double Rational::to_double() const {
    return double(static_cast<long double>(num_) / static_cast<long double>(den_));
}

std::string Rational::str() const { return to_string(num_) + "/" + to_string(den_); }

Rational Rational::operator-() const { return Rational(-num_, den_, Reduced{}); }

Rational operator+(const Rational& a, const Rational& b) {
    // a/b + c/d with g = gcd(b, d): (a*(d/g) + c*(b/g)) / (b/g * d)
    i128 g = i128(gcd(u128(a.den_), u128(b.den_)));
    i128 bd = a.den_ / g;
    i128 dd = b.den_ / g;
    i128 num = checked_add(checked_mul(a.num_, dd), checked_mul(b.num_, bd));
    i128 den = checked_mul(bd, b.den_);
    return Rational(num, den);
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
    u128 g1 = gcd(abs_u128(a.num_), u128(b.den_));
    u128 g2 = gcd(abs_u128(b.num_), u128(a.den_));
    if (g1 == 0) g1 = 1;
    if (g2 == 0) g2 = 1;
    u128 num = checked_mul(abs_u128(a.num_) / g1, abs_u128(b.num_) / g2);
    u128 den = checked_mul(u128(a.den_) / g2, u128(b.den_) / g1);
    return make_signed(a.is_negative() != b.is_negative(), num, den);
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.is_zero()) throw std::domain_error("rational division by zero");
    Rational inv(b.is_negative() ? -b.den_ : b.den_, b.is_negative() ? -b.num_ : b.num_, Rational::Reduced{});
    return a * inv;
}

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
    bool an = a.is_negative();
    bool bn = b.is_negative();
    if (an != bn) return an ? std::strong_ordering::less : std::strong_ordering::greater;
    auto ord = compare_nonneg(abs_u128(a.num_), u128(a.den_), abs_u128(b.num_), u128(b.den_));
    return an ? reverse(ord) : ord;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace hgain
