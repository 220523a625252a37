#include "hgain/halton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace hgain {

DigitVector::DigitVector(std::uint64_t base, std::vector<std::uint32_t> digits)
    : base_(base), digits_(std::move(digits)) {
    if (base < 2) throw std::invalid_argument("digit base must be at least 2");
    for (auto d : digits_)
        if (d >= base) throw std::invalid_argument("digit out of range for base " + std::to_string(base));
}

std::uint32_t DigitVector::digit(std::size_t l) const {
    if (l == 0 || l > digits_.size())
        throw PrecisionError("digit " + std::to_string(l) + " beyond precision " + std::to_string(digits_.size()));
    return digits_[l - 1];
}

DigitVector DigitVector::leading(std::size_t count) const {
    if (count > digits_.size()) throw PrecisionError("requested more digits than stored");
    return DigitVector(base_, std::vector<std::uint32_t>(digits_.begin(), digits_.begin() + count));
}

unsigned default_precision(std::uint64_t base) {
    if (base < 2) throw std::invalid_argument("digit base must be at least 2");
    constexpr u128 kTwo64 = u128(1) << 64;
    u128 power = 1;
    unsigned d = 0;
    while (power < kTwo64 && d < 64) {
        power *= base;
        ++d;
    }
    return d;
}

DigitVector digits_of(std::uint64_t i, std::uint64_t base, std::size_t precision) {
    if (base < 2) throw std::invalid_argument("digit base must be at least 2");
    if (precision == 0) throw std::invalid_argument("precision must be positive");
    std::vector<std::uint32_t> digits(precision, 0);
    std::uint64_t rest = i;
    for (std::size_t l = 0; l < precision && rest != 0; ++l) {
        digits[l] = std::uint32_t(rest % base);
        rest /= base;
    }
    if (rest != 0)
        throw PrecisionError("index " + std::to_string(i) + " needs more than " + std::to_string(precision) +
                             " base-" + std::to_string(base) + " digits");
    return DigitVector(base, std::move(digits));
}

double realize(std::span<const std::uint32_t> digits, std::uint64_t base, double tail) {
    const double b = double(base);
    double x = tail;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) x = (x + double(*it)) / b;
    constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
    return std::min(x, kBelowOne);
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    auto dv = digits_of(i, base, default_precision(base));
    return realize(dv.digits(), base);
}

Rational radical_inverse_exact(std::uint64_t i, std::uint64_t base) {
    u128 reversed = 0;
    u128 scale = 1;
    for (std::uint64_t rest = i; rest != 0; rest /= base) {
        reversed = checked_add(checked_mul(reversed, u128(base)), u128(rest % base));
        scale = checked_mul(scale, u128(base));
    }
    if (scale > u128(std::numeric_limits<i128>::max())) throw OverflowError("radical inverse denominator overflow");
    return Rational(i128(reversed), i128(scale));
}

PointSet::PointSet(std::vector<std::uint64_t> bases, std::vector<std::size_t> precision, std::uint64_t start,
                   std::size_t count)
    : bases_(std::move(bases)), precision_(std::move(precision)), start_(start), count_(count) {
    if (precision_.size() != bases_.size()) throw std::invalid_argument("precision/base length mismatch");
    offset_.resize(bases_.size());
    for (std::size_t c = 0; c < bases_.size(); ++c) {
        offset_[c] = stride_;
        stride_ += precision_[c];
    }
    digits_.assign(stride_ * count_, 0);
    coords_.assign(bases_.size() * count_, 0.0);
}

DigitVector PointSet::digit_vector(std::size_t row, std::size_t c) const {
    auto d = digits(row, c);
    return DigitVector(bases_[c], std::vector<std::uint32_t>(d.begin(), d.end()));
}

PointSet halton_points(const PrimeBasis& basis, std::uint64_t start, std::size_t n, const HaltonOptions& opts) {
    if (n == 0) throw std::invalid_argument("point count must be positive");
    const std::size_t d = basis.dimension();
    if (n - 1 > std::numeric_limits<std::uint64_t>::max() - start) throw std::invalid_argument("index range overflow");

    std::vector<std::size_t> order = opts.order;
    if (order.empty()) {
        order.resize(d);
        std::iota(order.begin(), order.end(), std::size_t{1});
    } else {
        if (order.size() != d) throw std::invalid_argument("coordinate order must list every coordinate");
        auto sorted = order;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t c = 0; c < d; ++c)
            if (sorted[c] != c + 1) throw std::invalid_argument("coordinate order is not a permutation of 1..d");
    }

    std::vector<std::uint64_t> bases(d);
    std::vector<std::size_t> precision(d);
    for (std::size_t c = 0; c < d; ++c) {
        bases[c] = basis.base(order[c]);
        std::size_t p = c < opts.precision.size() ? opts.precision[c] : 0;
        precision[c] = p == 0 ? default_precision(bases[c]) : p;
    }

    PointSet out(bases, precision, start, n);
    for (std::size_t row = 0; row < n; ++row) {
        std::uint64_t i = start + row;
        for (std::size_t c = 0; c < d; ++c) {
            auto dst = out.mutable_digits(row, c);
            std::uint64_t rest = i;
            for (auto& digit : dst) {
                digit = std::uint32_t(rest % bases[c]);
                rest /= bases[c];
            }
            if (rest != 0)
                throw PrecisionError("index " + std::to_string(i) + " exceeds precision of coordinate " +
                                     std::to_string(c + 1));
            out.set_coordinate(row, c, realize(dst, bases[c]));
        }
    }
    return out;
}

namespace {

u128 leading_value(std::span<const std::uint32_t> digits, std::uint64_t base, std::size_t level) {
    if (level > digits.size())
        throw PrecisionError("level " + std::to_string(level) + " exceeds stored precision " +
                             std::to_string(digits.size()));
    u128 r = 0;
    for (std::size_t l = 0; l < level; ++l) r = checked_add(checked_mul(r, u128(base)), u128(digits[l]));
    return r;
}

}  // namespace

StratumIndex stratum_index(std::span<const DigitVector> point, std::span<const std::size_t> levels) {
    if (levels.size() != point.size()) throw std::invalid_argument("one level per coordinate required");
    StratumIndex r(point.size());
    for (std::size_t c = 0; c < point.size(); ++c) r[c] = leading_value(point[c].digits(), point[c].base(), levels[c]);
    return r;
}

bool residue_match(std::uint64_t i, std::uint64_t i_prime, std::uint64_t base, unsigned r) {
    auto modulus = pow_bounded(base, r, std::numeric_limits<std::uint64_t>::max());
    if (!modulus) return i == i_prime;
    auto m = std::uint64_t(*modulus);
    return i % m == i_prime % m;
}

u128 strata_cycle(std::span<const std::uint64_t> bases, std::span<const std::size_t> levels) {
    if (levels.size() != bases.size()) throw std::invalid_argument("one level per coordinate required");
    u128 m = 1;
    for (std::size_t c = 0; c < bases.size(); ++c) m = checked_mul(m, checked_pow(bases[c], unsigned(levels[c])));
    return m;
}

StratumCounts stratum_counts(const PointSet& points, std::span<const std::size_t> levels) {
    if (levels.size() != points.dimension()) throw std::invalid_argument("one level per coordinate required");
    StratumCounts counts;
    StratumIndex r(points.dimension());
    for (std::size_t row = 0; row < points.count(); ++row) {
        for (std::size_t c = 0; c < points.dimension(); ++c)
            r[c] = leading_value(points.digits(row, c), points.base(c), levels[c]);
        ++counts[r];
    }
    return counts;
}

StratumCounts stratum_counts(const PrimeBasis& basis, std::uint64_t start, std::size_t batch,
                             std::span<const std::size_t> levels) {
    return stratum_counts(halton_points(basis, start, batch), levels);
}

}  // namespace hgain
