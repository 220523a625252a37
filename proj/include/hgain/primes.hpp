#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hgain {

/// Largest prime count served by default. Callers may pass a larger cap
/// explicitly; memory grows by roughly 4 bytes per prime.
inline constexpr std::size_t kDefaultPrimeCap = 10'000'000;

/// The first d primes, b_1 < b_2 < ... < b_d, used as Halton bases.
///
/// Shares an immutable prime table, so copies are cheap and safe to hand to
/// concurrent workers.
class PrimeBasis {
public:
    PrimeBasis() = default;

    std::size_t dimension() const { return dimension_; }

    /// Base of coordinate j (1-based).
    std::uint64_t base(std::size_t j) const { return (*table_)[j - 1]; }

    /// Zero-based access.
    std::uint64_t operator[](std::size_t idx) const { return (*table_)[idx]; }

    std::span<const std::uint32_t> bases() const { return {table_->data(), dimension_}; }

    /// Basis of the first `d` coordinates of this one.
    PrimeBasis prefix(std::size_t d) const;

private:
    friend PrimeBasis first_primes(std::size_t d, std::size_t cap);
    PrimeBasis(std::shared_ptr<const std::vector<std::uint32_t>> table, std::size_t d)
        : table_(std::move(table)), dimension_(d) {}

    std::shared_ptr<const std::vector<std::uint32_t>> table_;
    std::size_t dimension_ = 0;
};

/// First d primes in ascending order. Throws std::invalid_argument when
/// d == 0 or d > cap. Results come from a process-wide cache.
PrimeBasis first_primes(std::size_t d, std::size_t cap = kDefaultPrimeCap);

/// The j-th prime (1-based).
std::uint64_t nth_prime(std::size_t j, std::size_t cap = kDefaultPrimeCap);

/// Upper bound on the j-th prime: j(ln j + ln ln j) for j >= 6.
std::uint64_t nth_prime_upper_estimate(std::size_t j);

/// Uncached segmented sieve producing exactly `count` primes.
std::vector<std::uint32_t> sieve_first_primes(std::size_t count);

}  // namespace hgain
