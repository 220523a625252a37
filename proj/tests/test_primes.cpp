#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hgain/primes.hpp"

using namespace hgain;

namespace {

// Plain, unsegmented sieve used as an oracle.
std::vector<std::uint32_t> naive_primes(std::uint32_t limit) {
    std::vector<bool> composite(limit + 1, false);
    std::vector<std::uint32_t> out;
    for (std::uint32_t p = 2; p <= limit; ++p) {
        if (composite[p]) continue;
        out.push_back(p);
        for (std::uint64_t q = std::uint64_t(p) * p; q <= limit; q += p) composite[q] = true;
    }
    return out;
}

}  // namespace

TEST_CASE("first primes") {
    auto b = first_primes(6);
    CHECK(b.dimension() == 6);
    std::vector<std::uint32_t> got(b.bases().begin(), b.bases().end());
    CHECK(got == std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13});
    CHECK(b.base(1) == 2);
    CHECK(b[5] == 13);
    CHECK(nth_prime(27) == 103);
}

TEST_CASE("prefix of a basis") {
    auto b = first_primes(10);
    auto p = b.prefix(3);
    CHECK(p.dimension() == 3);
    CHECK(p.base(3) == 5);
}

TEST_CASE("invalid dimensions") {
    CHECK_THROWS_AS(first_primes(0), std::invalid_argument);
    CHECK_THROWS_AS(first_primes(11, 10), std::invalid_argument);
}

TEST_CASE("segmented sieve against a plain sieve") {
    auto oracle = naive_primes(15'485'863);
    REQUIRE(oracle.size() == 1'000'000);
    auto got = sieve_first_primes(1'000'000);
    CHECK(got == oracle);
    CHECK(nth_prime(1'000'000) == 15'485'863);
}

TEST_CASE("property: upper estimate bounds the nth prime") {
    auto primes = sieve_first_primes(200'000);
    for (std::size_t j = 1; j <= primes.size(); j += 97) CHECK(nth_prime_upper_estimate(j) >= primes[j - 1]);
}

TEST_CASE("property: consecutive calls agree and grow the cache consistently") {
    auto small = first_primes(100);
    auto large = first_primes(5000);
    for (std::size_t j = 1; j <= 100; ++j) CHECK(small.base(j) == large.base(j));
}
