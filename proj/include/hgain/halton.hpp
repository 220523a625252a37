#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hgain/int128.hpp"
#include "hgain/primes.hpp"
#include "hgain/rational.hpp"

namespace hgain {

/// Base-b digits of a value, least significant first. The stored length is
/// the precision.
class DigitVector {
public:
    DigitVector() = default;
    DigitVector(std::uint64_t base, std::vector<std::uint32_t> digits);

    std::uint64_t base() const { return base_; }
    std::size_t precision() const { return digits_.size(); }
    std::span<const std::uint32_t> digits() const { return digits_; }

    /// Digit l (1-based, l = 1 is the most significant fractional digit).
    std::uint32_t digit(std::size_t l) const;

    /// The first `count` digits.
    DigitVector leading(std::size_t count) const;

    friend bool operator==(const DigitVector&, const DigitVector&) = default;

private:
    std::uint64_t base_ = 2;
    std::vector<std::uint32_t> digits_;
};

/// Smallest D with b^D >= 2^64, capped at 64.
unsigned default_precision(std::uint64_t base);

/// Base-b digits of i padded to D digits. Throws PrecisionError if b^D <= i.
DigitVector digits_of(std::uint64_t i, std::uint64_t base, std::size_t precision);

/// sum_l digit_l * b^-l + tail * b^-D, rounded into [0, 1).
double realize(std::span<const std::uint32_t> digits, std::uint64_t base, double tail = 0.0);

double radical_inverse(std::uint64_t i, std::uint64_t base);
Rational radical_inverse_exact(std::uint64_t i, std::uint64_t base);

/// n consecutive Halton points with both digit and floating representations.
///
/// Coordinates are addressed zero-based here; coordinate c uses base
/// base(c). Row r holds index start() + r.
class PointSet {
public:
    PointSet() = default;
    PointSet(std::vector<std::uint64_t> bases, std::vector<std::size_t> precision, std::uint64_t start,
             std::size_t count);

    std::size_t dimension() const { return bases_.size(); }
    std::size_t count() const { return count_; }
    std::uint64_t start() const { return start_; }
    std::uint64_t index(std::size_t row) const { return start_ + row; }
    std::uint64_t base(std::size_t c) const { return bases_[c]; }
    std::size_t precision(std::size_t c) const { return precision_[c]; }

    std::span<const std::uint32_t> digits(std::size_t row, std::size_t c) const {
        return {digits_.data() + row * stride_ + offset_[c], precision_[c]};
    }
    std::span<std::uint32_t> mutable_digits(std::size_t row, std::size_t c) {
        return {digits_.data() + row * stride_ + offset_[c], precision_[c]};
    }
    DigitVector digit_vector(std::size_t row, std::size_t c) const;

    double coordinate(std::size_t row, std::size_t c) const { return coords_[row * bases_.size() + c]; }
    void set_coordinate(std::size_t row, std::size_t c, double x) { coords_[row * bases_.size() + c] = x; }

    friend bool operator==(const PointSet&, const PointSet&) = default;

private:
    std::vector<std::uint64_t> bases_;
    std::vector<std::size_t> precision_;
    std::vector<std::size_t> offset_;
    std::size_t stride_ = 0;
    std::uint64_t start_ = 0;
    std::size_t count_ = 0;
    std::vector<std::uint32_t> digits_;
    std::vector<double> coords_;
};

struct HaltonOptions {
    /// Per-coordinate digit precision; empty entries or zeros use the default.
    std::vector<std::size_t> precision;
    /// order[c] is the 1-based basis index feeding input c; empty means identity.
    std::vector<std::size_t> order;
};

/// Points a_i for i = start .. start + n - 1.
PointSet halton_points(const PrimeBasis& basis, std::uint64_t start, std::size_t n, const HaltonOptions& opts = {});

using StratumIndex = std::vector<u128>;

/// r_c = floor(b_c^{k_c} x_c), read from the leading k_c digits.
StratumIndex stratum_index(std::span<const DigitVector> point, std::span<const std::size_t> levels);

/// i == i' (mod b^r).
bool residue_match(std::uint64_t i, std::uint64_t i_prime, std::uint64_t base, unsigned r);

/// prod_c b_c^{k_c}; throws OverflowError past 128 bits.
u128 strata_cycle(std::span<const std::uint64_t> bases, std::span<const std::size_t> levels);

using StratumCounts = std::map<StratumIndex, std::uint64_t>;

StratumCounts stratum_counts(const PointSet& points, std::span<const std::size_t> levels);
StratumCounts stratum_counts(const PrimeBasis& basis, std::uint64_t start, std::size_t batch,
                             std::span<const std::size_t> levels);

}  // namespace hgain
