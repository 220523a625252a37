#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "hgain/errors.hpp"
#include "hgain/halton.hpp"
#include "hgain/primes.hpp"

using namespace hgain;

TEST_CASE("radical inverse values") {
    CHECK(radical_inverse(0, 2) == 0.0);
    CHECK(radical_inverse(1, 2) == 0.5);
    CHECK(radical_inverse(6, 2) == 0.375);
    CHECK(radical_inverse_exact(5, 3) == Rational(7, 9));
    CHECK(radical_inverse_exact(11, 5) == Rational(7, 25));
}

TEST_CASE("digits") {
    auto x = digits_of(11, 3, 4);  // 11 = 102_3
    CHECK(x.digit(1) == 2);
    CHECK(x.digit(2) == 0);
    CHECK(x.digit(3) == 1);
    CHECK(x.digit(4) == 0);
    CHECK_THROWS_AS(x.digit(5), PrecisionError);
    CHECK_THROWS_AS(digits_of(27, 3, 3), PrecisionError);
    CHECK_THROWS_AS(DigitVector(3, {3}), std::invalid_argument);
}

TEST_CASE("default precision covers 64-bit indices") {
    CHECK(default_precision(2) == 64);
    CHECK(default_precision(3) == 41);
    for (std::uint64_t b : {2u, 3u, 5u, 7u, 101u, 65521u}) {
        auto D = default_precision(b);
        CHECK_NOTHROW(digits_of(~std::uint64_t(0), b, D));
    }
}

TEST_CASE("first points of the 2-d sequence") {
    auto pts = halton_points(first_primes(2), 0, 4);
    CHECK(pts.coordinate(1, 0) == 0.5);
    CHECK(pts.coordinate(2, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(pts.coordinate(3, 0) == 0.75);
}

TEST_CASE("coordinate order") {
    HaltonOptions opts;
    opts.order = {2, 1};
    auto pts = halton_points(first_primes(2), 1, 1, opts);
    CHECK(pts.base(0) == 3);
    CHECK(pts.coordinate(0, 0) == doctest::Approx(1.0 / 3.0));
    opts.order = {1, 1};
    CHECK_THROWS(halton_points(first_primes(2), 0, 1, opts));
}

TEST_CASE("property: radical inverse matches exact value and lies in [0,1)") {
    std::mt19937_64 rng(3);
    auto basis = first_primes(8);
    for (int t = 0; t < 3000; ++t) {
        std::uint64_t i = rng() >> (rng() % 64);
        std::uint64_t b = basis.base(1 + rng() % 8);
        double x = radical_inverse(i, b);
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        if (i < (std::uint64_t(1) << 40)) CHECK(x == doctest::Approx(radical_inverse_exact(i, b).to_double()).epsilon(1e-15));
    }
}

TEST_CASE("property: radical inverse is injective on a block") {
    for (std::uint64_t b : {2u, 3u, 7u}) {
        std::set<double> seen;
        for (std::uint64_t i = 0; i < 5000; ++i) seen.insert(radical_inverse(i, b));
        CHECK(seen.size() == 5000);
    }
}

TEST_CASE("property: strata condition equals residue match") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 5000; ++t) {
        std::uint64_t b = std::vector<std::uint64_t>{2, 3, 5, 7}[rng() % 4];
        unsigned r = unsigned(rng() % 5);
        std::uint64_t i = rng() % 100000, ip = rng() % 100000;
        if (t % 3 == 0) ip = i + (rng() % 7) * std::uint64_t(std::pow(b, r));
        auto a = digits_of(i, b, 20), c = digits_of(ip, b, 20);
        std::vector<std::size_t> lv{r};
        DigitVector pa[] = {a}, pc[] = {c};
        bool same = stratum_index(pa, lv) == stratum_index(pc, lv);
        CHECK(same == residue_match(i, ip, b, r));
    }
}

TEST_CASE("property: consecutive blocks balance across strata") {
    auto basis = first_primes(3);
    std::vector<std::size_t> lv{1, 2, 1};
    const std::uint64_t bases[] = {2, 3, 5};
    CHECK(strata_cycle(bases, lv) == 2 * 9 * 5);
    for (std::uint64_t start : {0ull, 1ull, 89ull, 12345ull}) {
        auto counts = stratum_counts(basis, start, 90, lv);
        CHECK(counts.size() == 90);
        for (auto& [k, c] : counts) CHECK(c == 1);
    }
}
