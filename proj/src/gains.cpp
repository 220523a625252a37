#include "hgain/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hgain/halton.hpp"
#include "hgain/parallel.hpp"

namespace hgain {

namespace {

constexpr i128 kMaxI128 = std::numeric_limits<i128>::max();

i128 to_signed(u128 v) {
    if (v > u128(kMaxI128)) throw OverflowError("value exceeds signed 128-bit range");
    return i128(v);
}

// Scans a rational-valued sequence for its first strict maximum.
struct BestSoFar {
    bool valid = false;
    Rational value;
    std::size_t position = 0;

    void offer(const Rational& v, std::size_t pos) {
        if (!valid || v > value) {
            valid = true;
            value = v;
            position = pos;
        }
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// CoordSubset / GainQuery

CoordSubset CoordSubset::of(std::span<const unsigned> coordinates) {
    std::uint64_t mask = 0;
    for (unsigned j : coordinates) {
        if (j < 1 || j > 64) throw std::invalid_argument("coordinate " + std::to_string(j) + " outside 1..64");
        std::uint64_t bit = std::uint64_t{1} << (j - 1);
        if (mask & bit) throw std::invalid_argument("duplicate coordinate " + std::to_string(j));
        mask |= bit;
    }
    return CoordSubset(mask);
}

CoordSubset CoordSubset::full(unsigned d) {
    if (d > 64) throw std::invalid_argument("subsets are limited to 64 coordinates");
    return CoordSubset(d == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << d) - 1);
}

unsigned CoordSubset::max_coordinate() const { return mask_ == 0 ? 0 : 64 - unsigned(__builtin_clzll(mask_)); }

std::vector<unsigned> CoordSubset::members() const {
    std::vector<unsigned> out;
    out.reserve(size());
    for (std::uint64_t m = mask_; m != 0; m &= m - 1) out.push_back(unsigned(__builtin_ctzll(m)) + 1);
    return out;
}

bool subset_precedes(CoordSubset a, CoordSubset b) {
    if (a.size() != b.size()) return a.size() < b.size();
    auto ma = a.members();
    auto mb = b.members();
    return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

GainQuery GainQuery::make(const PrimeBasis& basis, CoordSubset u, std::vector<unsigned> levels, std::uint64_t n) {
    if (u.empty()) throw std::invalid_argument("gain coefficients need a nonempty coordinate set");
    if (u.max_coordinate() > basis.dimension())
        throw std::invalid_argument("coordinate " + std::to_string(u.max_coordinate()) + " exceeds basis dimension " +
                                    std::to_string(basis.dimension()));
    if (levels.size() != u.size())
        throw std::invalid_argument("expected " + std::to_string(u.size()) + " levels, got " +
                                    std::to_string(levels.size()));
    if (n == 0) throw std::invalid_argument("gain coefficients are undefined at n = 0");

    GainQuery q;
    q.u_ = u;
    q.levels_ = std::move(levels);
    q.n_ = n;
    for (unsigned j : u.members()) q.bases_.push_back(basis.base(j));
    for (std::size_t t = 0; t < q.bases_.size(); ++t) {
        u128 lo = checked_pow(q.bases_[t], q.levels_[t]);
        q.m_under_ = checked_mul(q.m_under_, lo);
        q.m_over_ = checked_mul(q.m_over_, checked_mul(lo, u128(q.bases_[t])));
    }
    return q;
}

GainQuery GainQuery::with_n(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("gain coefficients are undefined at n = 0");
    GainQuery q = *this;
    q.n_ = n;
    return q;
}

// ---------------------------------------------------------------------------
// Exact gains

u128 residue_pair_count(u128 m, u128 n) {
    if (m == 0 || n == 0) throw std::invalid_argument("residue_pair_count needs m, n >= 1");
    u128 q = n / m;
    if (q == 0) return n;
    // 2n - m > 0 because n >= m here.
    u128 grow = checked_add(n, checked_mul(checked_add(n, n) - m, q));
    return grow - checked_mul(m, checked_mul(q, q));
}

std::vector<SubsetTerm> subset_terms(const GainQuery& q) {
    const std::size_t s = q.subset().size();
    if (s > kMaxSubsetTermsLog2)
        throw std::invalid_argument("|u| = " + std::to_string(s) + " exceeds the subset enumeration bound");
    const auto members = q.subset().members();
    std::vector<u128> lo(s), hi(s);
    for (std::size_t t = 0; t < s; ++t) {
        lo[t] = checked_pow(q.bases()[t], q.levels()[t]);
        hi[t] = lo[t] * q.bases()[t];
    }

    std::vector<SubsetTerm> terms;
    terms.reserve(std::size_t{1} << s);
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << s); ++pick) {
        std::uint64_t vmask = 0;
        i128 h = 1;
        u128 m = 1;  // bounded by m_over, which fits
        for (std::size_t t = 0; t < s; ++t) {
            if (pick >> t & 1u) {
                vmask |= std::uint64_t{1} << (members[t] - 1);
                h *= i128(q.bases()[t]);
                m *= hi[t];
            } else {
                h = -h;
                m *= lo[t];
            }
        }
        terms.push_back({CoordSubset::from_mask(vmask), h, m, residue_pair_count(m, q.n())});
    }
    return terms;
}

namespace {

i128 normalizer(const GainQuery& q) {
    i128 den = q.n();
    for (auto b : q.bases()) den = checked_mul(den, i128(b - 1));
    return den;
}

}  // namespace

Rational gain_exact(const GainQuery& q) {
    i128 total = 0;
    for (const auto& term : subset_terms(q)) total = checked_add(total, checked_mul(term.h, to_signed(term.count)));
    return Rational(total, normalizer(q));
}

Rational gain_bruteforce(const GainQuery& q) {
    const std::uint64_t n = q.n();
    if (n > kBruteForceMaxN)
        throw std::invalid_argument("brute-force gain limited to n <= " + std::to_string(kBruteForceMaxN));
    const std::size_t s = q.subset().size();

    // floor(b^k a_i) and floor(b^{k+1} a_i) per member, read from digits.
    std::vector<std::vector<u128>> coarse(s, std::vector<u128>(n)), fine(s, std::vector<u128>(n));
    for (std::size_t t = 0; t < s; ++t) {
        const std::uint64_t b = q.bases()[t];
        const std::size_t k = q.levels()[t];
        const std::size_t precision = std::max<std::size_t>(default_precision(b), k + 1);
        std::vector<DigitVector> point(1);
        for (std::uint64_t i = 0; i < n; ++i) {
            point[0] = digits_of(i, b, precision);
            const std::size_t lk[] = {k};
            const std::size_t hk[] = {k + 1};
            coarse[t][i] = stratum_index(point, lk)[0];
            fine[t][i] = stratum_index(point, hk)[0];
        }
    }

    i128 total = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        for (std::uint64_t ip = 0; ip < n; ++ip) {
            i128 prod = 1;
            for (std::size_t t = 0; t < s && prod != 0; ++t) {
                i128 factor = (fine[t][i] == fine[t][ip] ? i128(q.bases()[t]) : 0) -
                              (coarse[t][i] == coarse[t][ip] ? 1 : 0);
                prod *= factor;
            }
            total = checked_add(total, prod);
        }
    }
    return Rational(total, normalizer(q));
}

// ---------------------------------------------------------------------------
// Worst-case searches

namespace {

// Calls visit(levels) for each level vector with prod b^{k} <= n, in
// lexicographic order.
template <class Visit>
void for_each_level_vector(std::span<const std::uint64_t> bases, std::uint64_t n, Visit&& visit) {
    std::vector<unsigned> levels(bases.size(), 0);
    auto recurse = [&](auto&& self, std::size_t t, u128 product) -> void {
        if (t == bases.size()) {
            visit(levels);
            return;
        }
        u128 p = product;
        for (unsigned k = 0; p <= n; ++k, p *= bases[t]) {
            levels[t] = k;
            self(self, t + 1, p);
        }
        levels[t] = 0;
    };
    recurse(recurse, 0, 1);
}

}  // namespace

GainArgmax gamma_at_n(std::size_t d, std::uint64_t n, const PrimeBasis& basis, unsigned threads) {
    if (d == 0 || d > 20) throw std::invalid_argument("gamma_at_n enumerates subsets only for 1 <= d <= 20");
    if (basis.dimension() < d) throw std::invalid_argument("basis has fewer than d coordinates");
    if (n == 0) throw std::invalid_argument("gain coefficients are undefined at n = 0");

    std::vector<CoordSubset> order;
    order.reserve((std::size_t{1} << d) - 1);
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << d); ++mask) order.push_back(CoordSubset::from_mask(mask));
    std::stable_sort(order.begin(), order.end(), subset_precedes);

    struct ChunkBest {
        bool valid = false;
        GainArgmax arg;
    };
    const unsigned workers = resolve_threads(threads);
    std::vector<ChunkBest> best(std::min<std::size_t>(workers, order.size()));
    parallel_chunks(order.size(), unsigned(best.size()), [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        ChunkBest& mine = best[chunk];
        for (std::size_t idx = begin; idx < end; ++idx) {
            CoordSubset u = order[idx];
            std::vector<std::uint64_t> bases;
            for (unsigned j : u.members()) bases.push_back(basis.base(j));
            for_each_level_vector(bases, n, [&](const std::vector<unsigned>& levels) {
                Rational g = gain_exact(GainQuery::make(basis, u, levels, n));
                if (!mine.valid || g > mine.arg.value) {
                    mine.valid = true;
                    mine.arg = {g, u, levels};
                }
            });
        }
    });

    GainArgmax result{Rational(0), CoordSubset{}, {}};
    bool have = false;
    for (auto& b : best) {
        if (b.valid && (!have || b.arg.value > result.value)) {
            result = b.arg;
            have = true;
        }
    }
    if (!have || result.value < Rational(1)) {
        // Every excluded level vector gives exactly 1; report the first one.
        unsigned k = 0;
        for (u128 p = 1; p <= n; p *= 2) ++k;
        result = {Rational(1), CoordSubset::of({1}), {k}};
    }
    return result;
}

namespace {

struct TermTable {
    std::vector<i128> h;
    std::vector<std::uint64_t> m;
    i128 h_never_wraps = 0;  // summed H of terms whose modulus exceeds the search range
};

// Sum over v of H_v C_{m_v,n} for n in [first, last], reporting each through `emit`.
template <bool Checked, class Emit>
void scan_unnormalized(const TermTable& table, std::uint64_t first, std::uint64_t last, Emit&& emit) {
    const std::size_t count = table.m.size();
    std::vector<std::uint64_t> q(count), r(count);
    for (std::size_t v = 0; v < count; ++v) {
        q[v] = first / table.m[v];
        r[v] = first % table.m[v];
    }
    for (std::uint64_t n = first;; ++n) {
        i128 total;
        if constexpr (Checked) {
            total = checked_mul(table.h_never_wraps, i128(n));
        } else {
            total = table.h_never_wraps * i128(n);
        }
        for (std::size_t v = 0; v < count; ++v) {
            const u128 mv = table.m[v];
            const u128 qv = q[v];
            const u128 c = mv * qv * qv + (2 * qv + 1) * r[v];
            if constexpr (Checked) {
                total = checked_add(total, checked_mul(table.h[v], to_signed(c)));
            } else {
                total += table.h[v] * i128(c);
            }
            if (++r[v] == table.m[v]) {
                r[v] = 0;
                ++q[v];
            }
        }
        emit(n, total);
        if (n == last) break;
    }
}

// a/b > c/d for nonnegative a, c and positive b, d.
bool ratio_greater(i128 a, std::uint64_t b, i128 c, std::uint64_t d) {
    i128 lhs, rhs;
    if (!__builtin_mul_overflow(a, i128(d), &lhs) && !__builtin_mul_overflow(c, i128(b), &rhs)) return lhs > rhs;
    return Rational(a, i128(b)) > Rational(c, i128(d));
}

}  // namespace

GainSummary gamma_max(std::size_t d, const PrimeBasis& basis, std::optional<std::uint64_t> n_cap, unsigned threads,
                      bool keep_curve) {
    if (d == 0) throw std::invalid_argument("dimension must be positive");
    if (d > basis.dimension()) throw std::invalid_argument("basis has fewer than d coordinates");
    if (d > kMaxSubsetTermsLog2) throw std::invalid_argument("dimension exceeds the subset enumeration bound");
    if (!n_cap && d > kGammaMaxDefaultDimension)
        throw std::invalid_argument("full gamma search is limited to d <= " +
                                    std::to_string(kGammaMaxDefaultDimension) + "; pass an n cap");
    if (n_cap && *n_cap == 0) throw std::invalid_argument("n cap must be positive");

    std::optional<u128> primorial = u128(1);
    for (std::size_t j = 1; j <= d && primorial; ++j) {
        u128 b = basis.base(j);
        primorial = *primorial > std::numeric_limits<u128>::max() / b ? std::nullopt : std::optional(*primorial * b);
    }
    if (!primorial && !n_cap) throw std::invalid_argument("product of bases exceeds 128 bits; pass an n cap");

    u128 limit = primorial ? *primorial : u128(std::numeric_limits<std::uint64_t>::max());
    if (n_cap) limit = std::min<u128>(limit, *n_cap);
    if (limit > std::numeric_limits<std::uint64_t>::max()) throw std::invalid_argument("search range exceeds 64 bits");
    const auto n_last = std::uint64_t(limit);

    // Inclusion-exclusion table for u = 1:d, k = 0.
    TermTable table;
    double log2_h = 0;
    for (std::uint64_t pick = 0; pick < (std::uint64_t{1} << d); ++pick) {
        i128 h = 1;
        u128 m = 1;
        bool wraps = true;
        for (std::size_t t = 0; t < d; ++t) {
            if (pick >> t & 1u) {
                h = checked_mul(h, i128(basis.base(t + 1)));
                if (wraps) {
                    m *= basis.base(t + 1);
                    if (m > n_last) wraps = false;
                }
            } else {
                h = -h;
            }
        }
        if (wraps) {
            table.h.push_back(h);
            table.m.push_back(std::uint64_t(m));
        } else {
            table.h_never_wraps = checked_add(table.h_never_wraps, h);
        }
        log2_h = std::max(log2_h, std::log2(double(abs_u128(h))));
    }
    const bool safe = double(d) + log2_h + 2.0 * std::log2(double(n_last)) + 1.0 < 125.0;
    i128 denominator_factor = 1;
    for (std::size_t j = 1; j <= d; ++j) denominator_factor = checked_mul(denominator_factor, i128(basis.base(j) - 1));

    struct ChunkBest {
        bool valid = false;
        i128 total = 0;
        std::uint64_t n = 0;
    };
    const unsigned workers = unsigned(std::min<std::uint64_t>(resolve_threads(threads), n_last));
    std::vector<ChunkBest> best(workers);
    std::vector<i128> curve_totals(keep_curve ? n_last : 0);

    parallel_chunks(std::size_t(n_last), workers, [&](std::size_t begin, std::size_t end, std::size_t chunk) {
        if (begin == end) return;
        ChunkBest& mine = best[chunk];
        auto emit = [&](std::uint64_t n, i128 total) {
            if (keep_curve) curve_totals[n - 1] = total;
            if (!mine.valid || ratio_greater(total, n, mine.total, mine.n)) mine = {true, total, n};
        };
        if (safe)
            scan_unnormalized<false>(table, begin + 1, end, emit);
        else
            scan_unnormalized<true>(table, begin + 1, end, emit);
    });

    ChunkBest winner;
    for (const auto& b : best)
        if (b.valid && (!winner.valid || ratio_greater(b.total, b.n, winner.total, winner.n))) winner = b;

    GainSummary out;
    out.d = d;
    out.argmax_n = winner.n;
    out.gamma = Rational(winner.total, checked_mul(i128(winner.n), denominator_factor));
    out.n_searched = n_last;
    out.complete = primorial && *primorial == limit;
    auto bounds = global_bounds(d);
    out.lower_bound = bounds.lower;
    out.upper_bound = bounds.upper;
    if (keep_curve) {
        out.curve.reserve(n_last);
        for (std::uint64_t n = 1; n <= n_last; ++n)
            out.curve.push_back(Rational(curve_totals[n - 1], checked_mul(i128(n), denominator_factor)));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Bounds

NStarResult lower_bound_n_star(CoordSubset u, const PrimeBasis& basis, unsigned j_star) {
    if (j_star != 1 && j_star != 2) throw std::invalid_argument("j* must be coordinate 1 or 2");
    if (!u.contains(j_star)) throw std::invalid_argument("j* must belong to u");
    std::uint64_t n_star = 1;
    Rational closed(1);
    for (unsigned j : u.members()) {
        if (j == j_star) continue;
        const std::uint64_t b = basis.base(j);
        if (__builtin_mul_overflow(n_star, b, &n_star)) throw OverflowError("n* exceeds 64 bits");
        closed *= Rational(i128(b + 1), i128(b));
    }
    Rational value = gain_exact(GainQuery::make(basis, u, std::vector<unsigned>(u.size(), 0), n_star));
    return {n_star, value, closed};
}

double upper_bound_u(CoordSubset u, const PrimeBasis& basis) {
    if (u.empty()) throw std::invalid_argument("upper bound needs a nonempty set");
    auto members = u.members();
    double log_sum = 0;
    // Bases increase with the coordinate, so the smallest base is the first member.
    for (std::size_t t = 1; t < members.size(); ++t) log_sum -= std::log1p(-1.0 / double(basis.base(members[t])));
    return std::exp(log_sum);
}

Rational upper_bound_u_exact(CoordSubset u, const PrimeBasis& basis) {
    if (u.empty()) throw std::invalid_argument("upper bound needs a nonempty set");
    auto members = u.members();
    Rational product(1);
    for (std::size_t t = 1; t < members.size(); ++t) {
        const i128 b = basis.base(members[t]);
        product *= Rational(b, b - 1);
    }
    return product;
}

namespace {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0;
    double comp_ = 0;
};

}  // namespace

GlobalBounds global_bounds(std::size_t d) {
    if (d == 0) throw std::invalid_argument("dimension must be positive");
    GlobalBounds out{1.0, 1.0};
    bounds_table(d, [&](const BoundsRow& row) {
        if (row.d == d) out = {row.lower, row.upper};
    });
    return out;
}

void bounds_table(std::size_t d_max, const std::function<void(const BoundsRow&)>& sink) {
    if (d_max == 0) throw std::invalid_argument("d_max must be positive");
    auto basis = first_primes(d_max);
    CompensatedSum log_lower, log_upper;
    for (std::size_t d = 1; d <= d_max; ++d) {
        const double b = double(basis.base(d));
        log_lower.add(std::log1p(1.0 / b));
        log_upper.add(-std::log1p(-1.0 / b));
        BoundsRow row{d, 1.0, 1.0, 1.5 + std::log(double(d) / 2.0)};
        if (d >= 2) {
            row.lower = 0.75 * std::exp(log_lower.value());
            row.upper = 0.5 * std::exp(log_upper.value());
        }
        sink(row);
    }
}

}  // namespace hgain
