#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hgain/errors.hpp"
#include "hgain/gains.hpp"
#include "hgain/primes.hpp"

using namespace hgain;

namespace {

const PrimeBasis& basis6() {
    static const PrimeBasis b = first_primes(6);
    return b;
}

Rational G(std::initializer_list<unsigned> u, std::vector<unsigned> k, std::uint64_t n) {
    return gain_exact(GainQuery::make(basis6(), CoordSubset::of(u), std::move(k), n));
}

struct RandomQuery {
    CoordSubset u;
    std::vector<unsigned> k;
    std::uint64_t n;
};

RandomQuery random_query(std::mt19937_64& rng, std::size_t d_max, unsigned k_max, std::uint64_t n_max) {
    std::uint64_t mask = 0;
    while (mask == 0) mask = rng() & ((std::uint64_t(1) << d_max) - 1);
    auto u = CoordSubset::from_mask(mask);
    std::vector<unsigned> k(u.size());
    for (auto& x : k) x = unsigned(rng() % (k_max + 1));
    return {u, k, 1 + rng() % n_max};
}

}  // namespace

TEST_CASE("pair counts") {
    CHECK(residue_pair_count(3, 7) == 17);
    CHECK(residue_pair_count(1, 7) == 49);
    CHECK(residue_pair_count(10, 7) == 7);
    for (u128 m = 1; m <= 12; ++m)
        for (u128 n = 1; n <= 40; ++n) {
            u128 brute = 0;
            for (u128 i = 0; i < n; ++i)
                for (u128 j = 0; j < n; ++j) brute += (i % m == j % m);
            CHECK(residue_pair_count(m, n) == brute);
        }
}

TEST_CASE("known gains") {
    CHECK(G({1, 2}, {0, 0}, 2) == Rational(3, 2));
    CHECK(G({1, 2, 3}, {0, 0, 0}, 2) == Rational(7, 8));
    CHECK(G({2}, {0}, 2) == Rational(1, 2));
    for (auto k : std::vector<std::vector<unsigned>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}) CHECK(G({1, 2}, k, 36).is_zero());
}

TEST_CASE("query validation") {
    CHECK_THROWS_AS(GainQuery::make(basis6(), CoordSubset::of({1, 2}), {0}, 3), std::invalid_argument);
    CHECK_THROWS_AS(GainQuery::make(basis6(), CoordSubset::of({1}), {0}, 0), std::invalid_argument);
    CHECK_THROWS_AS(GainQuery::make(basis6(), CoordSubset::of({7}), {0}, 1), std::invalid_argument);
    CHECK_THROWS_AS(CoordSubset::of({1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(GainQuery::make(basis6(), CoordSubset::of({1}), {200}, 1), OverflowError);
}

TEST_CASE("one coordinate closed form") {
    for (unsigned j = 1; j <= 6; ++j) {
        const std::uint64_t b = basis6().base(j);
        auto q = GainQuery::make(basis6(), CoordSubset::of({j}), {0}, 1);
        for (std::uint64_t n = 1; n <= b; ++n)
            CHECK(gain_exact(q.with_n(n)) == Rational(i128(b - n), i128(b - 1)));
    }
}

TEST_CASE("brute force agrees with the closed form") {
    auto basis = first_primes(3);
    for (std::uint64_t mask = 1; mask < 8; ++mask) {
        auto u = CoordSubset::from_mask(mask);
        std::vector<unsigned> k(u.size(), 0);
        if (mask == 5) k[1] = 1;
        auto q = GainQuery::make(basis, u, k, 1);
        for (std::uint64_t n = 1; n <= 60; ++n) CHECK(gain_exact(q.with_n(n)) == gain_bruteforce(q.with_n(n)));
    }
}

TEST_CASE("worst-case search") {
    auto basis = first_primes(4);
    auto g1 = gamma_max(1, basis);
    CHECK(g1.gamma == Rational(1));
    CHECK(g1.argmax_n == 1);
    auto g2 = gamma_max(2, basis);
    CHECK(g2.gamma == Rational(3, 2));
    CHECK(g2.argmax_n == 2);
    auto g3 = gamma_max(3, basis);
    CHECK(g3.gamma == Rational(9, 5));
    CHECK(g3.argmax_n == 10);
    CHECK(g3.complete);
    auto g4 = gamma_max(4, basis);
    CHECK(g4.gamma == Rational(72, 35));
    CHECK(g4.argmax_n == 70);
    auto capped = gamma_max(3, basis, 5);
    CHECK(!capped.complete);
    CHECK(capped.n_searched == 5);
}

TEST_CASE("property: Prop 2, gain is one below m_under") {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 300; ++t) {
        auto rq = random_query(rng, 4, 2, 1);
        auto q = GainQuery::make(basis6(), rq.u, rq.k, 1);
        const auto lo = std::uint64_t(q.m_under());
        for (std::uint64_t n = 1; n < lo && n < 400; n += 1 + n / 7) CHECK(gain_exact(q.with_n(n)) == Rational(1));
    }
}

TEST_CASE("property: Prop 3 and Prop 4, periodicity in m_over") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 300; ++t) {
        auto rq = random_query(rng, 3, 1, 1);
        auto q = GainQuery::make(basis6(), rq.u, rq.k, 1);
        const auto M = std::uint64_t(q.m_over());
        const std::uint64_t qq = 1 + rng() % 4;
        CHECK(gain_exact(q.with_n(qq * M)).is_zero());
        const std::uint64_t r = 1 + rng() % (M - 1);  // M >= 2
        const std::uint64_t n = qq * M + r;
        CHECK(gain_exact(q.with_n(n)) == Rational(i128(r), i128(n)) * gain_exact(q.with_n(r)));
    }
}

TEST_CASE("property: Prop 5 and Corollary 2, scaling by bases") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 300; ++t) {
        auto rq = random_query(rng, 4, 2, 400);
        const auto members = rq.u.members();
        const std::size_t pick = rng() % members.size();
        auto up = rq.k;
        ++up[pick];
        const std::uint64_t b = basis6().base(members[pick]);
        CHECK(gain_exact(GainQuery::make(basis6(), rq.u, up, rq.n * b)) ==
              gain_exact(GainQuery::make(basis6(), rq.u, rq.k, rq.n)));

        std::uint64_t scale = 1;
        for (std::size_t t2 = 0; t2 < members.size(); ++t2)
            for (unsigned e = 0; e < rq.k[t2]; ++e) scale *= basis6().base(members[t2]);
        CHECK(gain_exact(GainQuery::make(basis6(), rq.u, rq.k, rq.n * scale)) ==
              gain_exact(GainQuery::make(basis6(), rq.u, std::vector<unsigned>(members.size(), 0), rq.n)));
    }
}

TEST_CASE("property: gains are nonnegative and obey the Theorem 3 bound") {
    std::mt19937_64 rng(24);
    for (int t = 0; t < 1500; ++t) {
        auto rq = random_query(rng, 5, 2, 3000);
        Rational g = gain_exact(GainQuery::make(basis6(), rq.u, rq.k, rq.n));
        CHECK(!g.is_negative());
        CHECK(g <= upper_bound_u_exact(rq.u, basis6()));
        CHECK(upper_bound_u(rq.u, basis6()) == doctest::Approx(upper_bound_u_exact(rq.u, basis6()).to_double()));
    }
}

TEST_CASE("property: Theorems 1 and 2, the search reduction is exhaustive") {
    // Over every u, every k with k_j <= 2 and every n up to 300, nothing beats
    // the reduced search of u = 1:d, k = 0, n <= primorial.
    auto basis = first_primes(3);
    const Rational gamma3 = gamma_max(3, basis).gamma;
    Rational best(0);
    for (std::uint64_t mask = 1; mask < 8; ++mask) {
        auto u = CoordSubset::from_mask(mask);
        const std::size_t s = u.size();
        std::vector<unsigned> k(s, 0);
        for (;;) {
            auto q = GainQuery::make(basis, u, k, 1);
            for (std::uint64_t n = 1; n <= 300; ++n) best = std::max(best, gain_exact(q.with_n(n)));
            std::size_t t = 0;
            while (t < s && k[t] == 2) k[t++] = 0;
            if (t == s) break;
            ++k[t];
        }
    }
    CHECK(best == gamma3);
    for (std::uint64_t n : {1u, 2u, 10u, 29u, 30u, 31u}) CHECK(gamma_at_n(3, n, basis).value <= gamma3);
    CHECK(gamma_at_n(3, 10, basis).value == gamma3);
}

TEST_CASE("property: Theorem 5 witness equals its closed form") {
    auto basis = first_primes(5);
    for (std::uint64_t mask = 1; mask < 32; ++mask) {
        auto u = CoordSubset::from_mask(mask);
        for (unsigned j_star : {1u, 2u}) {
            if (!u.contains(j_star)) continue;
            auto r = lower_bound_n_star(u, basis, j_star);
            CHECK(r.value == r.closed_form);
        }
    }
}

TEST_CASE("bounds table") {
    std::vector<BoundsRow> rows;
    bounds_table(50, [&](const BoundsRow& r) { rows.push_back(r); });
    REQUIRE(rows.size() == 50);
    CHECK(rows[0].lower == 1.0);
    CHECK(rows[0].upper == 1.0);
    CHECK(rows[1].lower == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(rows[1].upper == doctest::Approx(1.5).epsilon(1e-13));
    CHECK(rows[5].upper == doctest::Approx(2.6067708333).epsilon(1e-9));
    CHECK(rows[5].lower == doctest::Approx(2.4167832168).epsilon(1e-9));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].lower >= rows[i - 1].lower);
        CHECK(rows[i].upper >= rows[i - 1].upper);
        CHECK(rows[i].lower <= rows[i].upper + 1e-12);
        CHECK(rows[i].guide == doctest::Approx(1.5 + std::log(double(rows[i].d) / 2)));
    }
    // The exact worst case sits inside the bracket.
    auto basis = first_primes(4);
    for (std::size_t d = 2; d <= 4; ++d) {
        double g = gamma_max(d, basis).gamma.to_double();
        CHECK(g >= rows[d - 1].lower - 1e-12);
        CHECK(g <= rows[d - 1].upper + 1e-12);
    }
}
