#include "hgain/primes.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace hgain {

namespace {

constexpr std::uint64_t kSegmentSize = 1u << 18;

// Plain sieve of Eratosthenes on [2, limit].
std::vector<std::uint32_t> small_primes(std::uint64_t limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint64_t p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        out.push_back(std::uint32_t(p));
        for (std::uint64_t q = p * p; q <= limit; q += p) composite[q] = true;
    }
    return out;
}

std::uint64_t isqrt(std::uint64_t v) {
    auto r = std::uint64_t(std::sqrt(double(v)));
    while (r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

std::mutex g_cache_mutex;
std::shared_ptr<const std::vector<std::uint32_t>> g_cache;

}  // namespace

std::uint64_t nth_prime_upper_estimate(std::size_t j) {
    if (j < 6) return 13;
    double x = double(j);
    return std::uint64_t(std::ceil(x * (std::log(x) + std::log(std::log(x))))) + 1;
}

std::vector<std::uint32_t> sieve_first_primes(std::size_t count) {
    std::vector<std::uint32_t> out;
    if (count == 0) return out;
    out.reserve(count);

    std::uint64_t limit = nth_prime_upper_estimate(count);
    std::vector<std::uint32_t> base = small_primes(isqrt(limit) + 1);
    std::vector<char> segment(kSegmentSize);

    for (std::uint64_t low = 2; out.size() < count; low += kSegmentSize) {
        std::uint64_t high = low + kSegmentSize;  // exclusive
        // The estimate may fall short; grow the sieving primes on demand.
        if (std::uint64_t need = isqrt(high) + 1; need > std::uint64_t(base.back()))
            base = small_primes(std::max(need, 2 * std::uint64_t(base.back())));

        std::fill(segment.begin(), segment.end(), 1);
        for (std::uint32_t p : base) {
            std::uint64_t pp = std::uint64_t(p) * p;
            if (pp >= high) break;
            std::uint64_t start = std::max(pp, (low + p - 1) / p * p);
            for (std::uint64_t m = start; m < high; m += p) segment[m - low] = 0;
        }
        for (std::uint64_t v = low; v < high && out.size() < count; ++v)
            if (segment[v - low]) out.push_back(std::uint32_t(v));
    }
    return out;
}

PrimeBasis PrimeBasis::prefix(std::size_t d) const {
    if (d > dimension_) throw std::invalid_argument("prefix longer than basis");
    return PrimeBasis(table_, d);
}

PrimeBasis first_primes(std::size_t d, std::size_t cap) {
    if (d == 0) throw std::invalid_argument("prime count must be positive");
    if (d > cap)
        throw std::invalid_argument("prime count " + std::to_string(d) + " exceeds cap " + std::to_string(cap));
    std::lock_guard lock(g_cache_mutex);
    if (!g_cache || g_cache->size() < d) {
        // Grow geometrically so repeated small increases stay cheap.
        std::size_t want = std::max<std::size_t>(d, g_cache ? std::min(cap, 2 * g_cache->size()) : 64);
        g_cache = std::make_shared<const std::vector<std::uint32_t>>(sieve_first_primes(want));
    }
    return PrimeBasis(g_cache, d);
}

std::uint64_t nth_prime(std::size_t j, std::size_t cap) {
    if (j == 0 || j > cap) throw std::invalid_argument("prime index out of range: " + std::to_string(j));
    return first_primes(j, cap).base(j);
}

}  // namespace hgain
