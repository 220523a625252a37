// Acceptance suite. Prints one PASS/FAIL line per criterion.
//   acceptance                 run all criteria
//   acceptance --criterion N   run criterion N only (exit status reflects it)

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "hgain/cli.hpp"
#include "hgain/gains.hpp"
#include "hgain/halton.hpp"
#include "hgain/primes.hpp"
#include "hgain/rqmc.hpp"
#include "hgain/scramble.hpp"

using namespace hgain;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) detail << what;
            else detail << "; " << what;
            pass = false;
        }
    }
};

struct CliRun {
    int code;
    std::string out;
};

CliRun cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = cli::dispatch(args, out, err);
    return {code, out.str()};
}

Rational parse_gain_text(const std::string& text) {
    return Rational::parse(text.substr(0, text.find(' ')));
}

void ac1(Outcome& o) {
    auto a = cli({"gain", "--u", "1,2", "--k", "0,0", "--n", "2"});
    o.require(a.code == 0 && parse_gain_text(a.out) == Rational(3, 2), "G_{12,00}(2) != 3/2: " + a.out);
    auto b = cli({"gain", "--u", "1,2,3", "--k", "0,0,0", "--n", "2"});
    o.require(b.code == 0 && parse_gain_text(b.out) == Rational(7, 8), "G_{123,000}(2) != 7/8: " + b.out);
    auto basis = first_primes(2);
    for (auto k : std::vector<std::vector<unsigned>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}) {
        Rational g = gain_exact(GainQuery::make(basis, CoordSubset::of({1, 2}), k, 36));
        o.require(g.is_zero(), "curve k=(" + std::to_string(k[0]) + "," + std::to_string(k[1]) + ") at 36 = " + g.str());
    }
    o.detail << "3/2, 7/8, four zeros at n=36";
}

void ac2(Outcome& o) {
    auto basis = first_primes(3);
    std::uint64_t comparisons = 0, mismatches = 0;
    for (std::uint64_t mask = 1; mask < 8; ++mask) {
        auto u = CoordSubset::from_mask(mask);
        const std::size_t s = u.size();
        for (std::uint64_t kbits = 0; kbits < (std::uint64_t(1) << s); ++kbits) {
            std::vector<unsigned> k(s);
            for (std::size_t t = 0; t < s; ++t) k[t] = unsigned(kbits >> t & 1);
            auto q = GainQuery::make(basis, u, k, 1);
            for (std::uint64_t n = 1; n <= 90; ++n) {
                ++comparisons;
                if (gain_exact(q.with_n(n)) != gain_bruteforce(q.with_n(n))) ++mismatches;
            }
        }
    }
    o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
    o.require(cli({"oracle-check", "--d", "3", "--n-max", "90"}).code == 0, "oracle-check exit code nonzero");
    o.detail << comparisons << " comparisons, " << mismatches << " mismatches";
}

struct Query {
    CoordSubset u;
    std::vector<unsigned> k;
    std::uint64_t n;
};

// The randomized query sample shared by criteria 3 and 5.
std::vector<Query> sample_queries() {
    std::mt19937_64 rng(20240601);
    std::vector<Query> out;
    for (int t = 0; t < 600; ++t) {
        std::uint64_t mask = 1 + rng() % 15;
        auto u = CoordSubset::from_mask(mask);
        std::vector<unsigned> k(u.size());
        for (auto& x : k) x = unsigned(rng() % 3);
        out.push_back({u, k, 1 + rng() % 5000});
    }
    return out;
}

void ac3(Outcome& o) {
    auto basis = first_primes(4);
    auto queries = sample_queries();
    std::uint64_t checks = 0, violations = 0;
    auto check = [&](bool ok) {
        ++checks;
        if (!ok) ++violations;
    };
    for (const auto& qr : queries) {
        auto q = GainQuery::make(basis, qr.u, qr.k, qr.n);
        const Rational g = gain_exact(q);
        const auto lo = std::uint64_t(q.m_under()), hi = std::uint64_t(q.m_over());
        if (qr.n < lo) check(g == Rational(1));
        check(gain_exact(q.with_n((1 + qr.n % 3) * hi)).is_zero());
        const std::uint64_t r = qr.n % hi;
        check(r == 0 ? g.is_zero() : g == Rational(i128(r), i128(qr.n)) * gain_exact(q.with_n(r)));
        const auto members = qr.u.members();
        for (std::size_t t = 0; t < members.size(); ++t) {
            auto up = qr.k;
            ++up[t];
            check(gain_exact(GainQuery::make(basis, qr.u, up, qr.n * basis.base(members[t]))) == g);
        }
        auto zero = GainQuery::make(basis, qr.u, std::vector<unsigned>(members.size(), 0), qr.n);
        check(gain_exact(q.with_n(qr.n * lo)) == gain_exact(zero));
    }
    o.require(queries.size() >= 500, "fewer than 500 queries");
    o.require(violations == 0, std::to_string(violations) + " violations");
    o.detail << queries.size() << " queries, " << checks << " checks, " << violations << " violations";
}

void ac4(Outcome& o) {
    auto gamma = [&](const char* d) { return nlohmann::json::parse(cli({"gamma", "--d", d}).out); };
    auto g1 = gamma("1");
    o.require(g1["gamma"] == "1/1" && g1["argmax_n"] == 1, "gamma d=1: " + g1.dump());
    auto g2 = gamma("2");
    o.require(g2["gamma"] == "3/2" && g2["argmax_n"] == 2, "gamma d=2: " + g2.dump());
    auto g3 = gamma("3");
    Rational v = Rational::parse(g3["gamma"].get<std::string>());
    o.require(v >= Rational(9, 5) && v <= Rational(15, 8), "gamma d=3 outside [9/5, 15/8]: " + v.str());
    o.detail << "Gamma_1=1 (n=1), Gamma_2=3/2 (n=2), Gamma_3=" << v << " (n=" << g3["argmax_n"] << ")";
}

void ac5(Outcome& o) {
    auto basis = first_primes(5);
    std::uint64_t over = 0, witness = 0, witness_bad = 0;
    for (const auto& qr : sample_queries()) {
        Rational g = gain_exact(GainQuery::make(basis, qr.u, qr.k, qr.n));
        if (g > upper_bound_u_exact(qr.u, basis)) ++over;
    }
    for (std::uint64_t mask = 1; mask < 32; ++mask) {
        auto u = CoordSubset::from_mask(mask);
        for (unsigned j : {1u, 2u}) {
            if (!u.contains(j)) continue;
            auto r = lower_bound_n_star(u, basis, j);
            ++witness;
            if (r.value != r.closed_form) ++witness_bad;
        }
    }
    o.require(over == 0, std::to_string(over) + " gains above the upper bound");
    o.require(witness_bad == 0, std::to_string(witness_bad) + " n* witnesses differ from closed form");
    o.detail << "upper bound held on sample; " << witness << " n* witnesses exact";
}

void ac6(Outcome& o) {
    auto r = cli({"bounds", "--d-max", "1000000"});
    o.require(r.code == 0, "bounds exit code nonzero");
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    double prev_lower = 0, prev_upper = 0, worst_margin = INFINITY;
    std::size_t rows = 0, guide_violations = 0, first_violation = 0, worst_d = 0;
    bool monotone = true, d2_ok = false;
    while (std::getline(in, line)) {
        std::size_t d;
        double lower, upper, guide;
        if (std::sscanf(line.c_str(), "%zu,%lf,%lf,%lf", &d, &lower, &upper, &guide) != 4) continue;
        ++rows;
        if (rows > 1 && (lower < prev_lower || upper < prev_upper)) monotone = false;
        prev_lower = lower;
        prev_upper = upper;
        if (d == 2) d2_ok = std::abs(lower - 1.5) <= 1e-12 && std::abs(upper - 1.5) <= 1e-12;
        if (d >= 6) {
            const double margin = guide - upper;
            if (margin < 0 && guide_violations++ == 0) first_violation = d;
            if (margin < worst_margin) {
                worst_margin = margin;
                worst_d = d;
            }
        }
    }
    o.require(rows == 1'000'000, "expected 1e6 rows, got " + std::to_string(rows));
    o.require(d2_ok, "d=2 bounds differ from 1.5");
    o.require(monotone, "bound columns not nondecreasing");
    o.require(guide_violations == 0, "upper > 1.5+ln(d/2) for " + std::to_string(guide_violations) +
                                         " of d in [6,1e6] (first d=" + std::to_string(first_violation) +
                                         ", worst margin " + std::to_string(worst_margin) + " at d=" +
                                         std::to_string(worst_d) + ")");
    if (o.pass) o.detail << "1e6 rows, monotone, guide respected";
}

void ac7(Outcome& o) {
    auto basis = first_primes(2);
    auto f = HaarIntegrand::make_default(CoordSubset::of({1, 2}), {0, 0}, basis);
    const std::size_t R = 100'000;
    for (auto kind : {ScrambleKind::nested_uniform, ScrambleKind::linear_digital_shift}) {
        const std::string name = to_string(kind);
        ScrambleSpec spec{kind, 7, 0, {}};
        auto e2 = rqmc_estimate(f, basis, 2, R, spec);
        o.require(std::abs(e2.empirical_gain - 1.5) <= 0.05, name + " n=2 gain " + std::to_string(e2.empirical_gain));
        auto e6 = rqmc_estimate(f, basis, 6, R, spec);
        double worst = 0;
        for (double m : e6.replicate_means) worst = std::max(worst, std::abs(m));
        o.require(worst <= 1e-12, name + " n=6 replicate mean " + std::to_string(worst));
        auto e1 = rqmc_estimate(f, basis, 1, R, spec);
        o.require(std::abs(e1.empirical_gain - 1.0) <= 0.05, name + " n=1 gain " + std::to_string(e1.empirical_gain));
        o.detail << name << ": G(2)=" << e2.empirical_gain << "+-" << e2.gain_std_error << " G(1)=" << e1.empirical_gain
                 << "+-" << e1.gain_std_error << " max|mean(6)|=" << worst
                 << (kind == ScrambleKind::nested_uniform ? "; " : "");
    }
}

void ac8(Outcome& o) {
    auto basis = first_primes(3);
    std::mt19937_64 rng(450);
    const std::vector<std::size_t> fine{1, 2, 2};    // 2*9*25 = 450 strata
    const std::vector<std::size_t> coarse{1, 1, 1};  // 2*3*5 = 30 strata
    std::size_t windows = 0;
    for (int t = 0; t < 20; ++t) {
        const std::uint64_t start = rng() >> 24;
        auto pts = halton_points(basis, start, 450);
        for (auto kind : {ScrambleKind::none, ScrambleKind::nested_uniform, ScrambleKind::linear_digital_shift}) {
            auto x = randomize(pts, ScrambleSpec{kind, 99, std::uint64_t(t), {}});
            ++windows;
            auto a = stratum_counts(x, fine);
            bool once = a.size() == 450;
            for (auto& [key, c] : a) once = once && c == 1;
            o.require(once, "start " + std::to_string(start) + " " + to_string(kind) + ": 450 strata not hit once");
            auto b = stratum_counts(x, coarse);
            bool even = b.size() == 30;
            for (auto& [key, c] : b) even = even && c == 15;
            o.require(even, "start " + std::to_string(start) + " " + to_string(kind) + ": 30 strata not hit 15 times");
        }
    }
    o.detail << windows << " windows balanced (450 strata x1, 30 strata x15)";
}

struct Criterion {
    int id;
    const char* title;
    double limit_seconds;
    std::function<void(Outcome&)> body;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance suite"};
    int only = 0;
    app.add_option("--criterion", only, "Run a single criterion")->check(CLI::Range(1, 8));
    CLI11_PARSE(app, argc, argv);

    const Criterion criteria[] = {
        {1, "exact value reproduction", 1, ac1},
        {2, "oracle equivalence", 30, ac2},
        {3, "proposition suite", 60, ac3},
        {4, "worst-case search", 10, ac4},
        {5, "upper bound and n* witness", 60, ac5},
        {6, "bounds table at scale", 60, ac6},
        {7, "variance law", 120, ac7},
        {8, "strata balance", 5, ac8},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        if (only && c.id != only) continue;
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            c.body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (secs > c.limit_seconds) o.require(false, "took " + std::to_string(secs) + " s");
        if (!o.pass) ++failures;
        std::printf("AC%d %s  %-28s %8.3f s  %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title, secs, o.detail.str().c_str());
    }
    return failures == 0 ? 0 : 1;
}
