#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hgain/int128.hpp"
#include "hgain/primes.hpp"
#include "hgain/rational.hpp"

namespace hgain {

/// Nonempty-or-empty set of coordinates drawn from 1..64, stored as a bitmask
/// with bit j-1 standing for coordinate j.
class CoordSubset {
public:
    constexpr CoordSubset() = default;
    static CoordSubset from_mask(std::uint64_t mask) { return CoordSubset(mask); }
    /// From 1-based coordinate numbers; duplicates are rejected.
    static CoordSubset of(std::span<const unsigned> coordinates);
    static CoordSubset of(std::initializer_list<unsigned> coordinates) {
        return of(std::span<const unsigned>(coordinates.begin(), coordinates.size()));
    }
    /// {1, ..., d}.
    static CoordSubset full(unsigned d);

    std::uint64_t mask() const { return mask_; }
    bool empty() const { return mask_ == 0; }
    std::size_t size() const { return std::size_t(__builtin_popcountll(mask_)); }
    bool contains(unsigned j) const { return j >= 1 && j <= 64 && (mask_ >> (j - 1) & 1u); }
    /// Largest coordinate, 0 when empty.
    unsigned max_coordinate() const;
    /// Members in increasing order.
    std::vector<unsigned> members() const;

    friend bool operator==(CoordSubset, CoordSubset) = default;

private:
    explicit constexpr CoordSubset(std::uint64_t mask) : mask_(mask) {}
    std::uint64_t mask_ = 0;
};

/// Orders subsets by size, then lexicographically by member list.
bool subset_precedes(CoordSubset a, CoordSubset b);

/// A gain coefficient request G_{u,k}(n) bound to its bases.
///
/// levels[t] is the level of the t-th smallest member of u.
class GainQuery {
public:
    static GainQuery make(const PrimeBasis& basis, CoordSubset u, std::vector<unsigned> levels, std::uint64_t n);

    CoordSubset subset() const { return u_; }
    std::span<const unsigned> levels() const { return levels_; }
    std::span<const std::uint64_t> bases() const { return bases_; }
    std::uint64_t n() const { return n_; }

    /// prod_{j in u} b_j^{k_j}
    u128 m_under() const { return m_under_; }
    /// prod_{j in u} b_j^{k_j + 1}
    u128 m_over() const { return m_over_; }

    GainQuery with_n(std::uint64_t n) const;

private:
    GainQuery() = default;
    CoordSubset u_;
    std::vector<unsigned> levels_;
    std::vector<std::uint64_t> bases_;
    std::uint64_t n_ = 1;
    u128 m_under_ = 1;
    u128 m_over_ = 1;
};

/// One inclusion-exclusion term of the unnormalized gain.
struct SubsetTerm {
    CoordSubset v;
    i128 h;     ///< prod_{j in v} b_j * (-1)^{|u - v|}
    u128 m;     ///< prod_{j in v} b_j^{k_j+1} * prod_{j in u-v} b_j^{k_j}
    u128 count; ///< C_{m,n}
};

inline constexpr std::size_t kMaxSubsetTermsLog2 = 30;
inline constexpr std::uint64_t kBruteForceMaxN = 10'000;

/// #{(i, i') in [0,n)^2 : i == i' (mod m)} = n + (2n - m) q - m q^2, q = floor(n/m).
u128 residue_pair_count(u128 m, u128 n);

std::vector<SubsetTerm> subset_terms(const GainQuery& q);

/// G_{u,k}(n) through the closed-form pair counts.
Rational gain_exact(const GainQuery& q);

/// G_{u,k}(n) from the literal double sum over index pairs, comparing
/// stratum floors read from the base-b digits of each index.
Rational gain_bruteforce(const GainQuery& q);

struct GainArgmax {
    Rational value;
    CoordSubset u;
    std::vector<unsigned> levels;
};

/// Gamma_d(n): the largest G_{u,k}(n) over nonempty u in 1:d and all k.
/// Levels with prod b_j^{k_j} > n give exactly 1 and act as a floor.
GainArgmax gamma_at_n(std::size_t d, std::uint64_t n, const PrimeBasis& basis, unsigned threads = 0);

inline constexpr std::size_t kGammaMaxDefaultDimension = 8;

struct GainSummary {
    std::size_t d = 0;
    Rational gamma;
    std::uint64_t argmax_n = 0;
    std::uint64_t n_searched = 0;
    /// True when the whole range 1..prod b_j was searched, so gamma is Gamma_d.
    bool complete = false;
    double lower_bound = 1.0;
    double upper_bound = 1.0;
    /// G_{1:d,0}(n) for n = 1..n_searched when requested.
    std::vector<Rational> curve;
};

/// Gamma_d = max over n in 1..prod_{j<=d} b_j of G_{1:d,0}(n), smallest
/// argmax n. Dimensions above 8 require an explicit n_cap.
GainSummary gamma_max(std::size_t d, const PrimeBasis& basis, std::optional<std::uint64_t> n_cap = std::nullopt,
                      unsigned threads = 0, bool keep_curve = false);

struct NStarResult {
    std::uint64_t n_star;
    Rational value;        ///< gain_exact at n_star
    Rational closed_form;  ///< prod_{j in u, j != j*} (b_j + 1) / b_j
};

/// Evaluates the worst-n construction for u at j_star in u with j_star in {1, 2}.
NStarResult lower_bound_n_star(CoordSubset u, const PrimeBasis& basis, unsigned j_star);

/// prod_{j in u - {j_m}} b_j / (b_j - 1), j_m the coordinate with the smallest base.
double upper_bound_u(CoordSubset u, const PrimeBasis& basis);
Rational upper_bound_u_exact(CoordSubset u, const PrimeBasis& basis);

struct GlobalBounds {
    double lower;
    double upper;
};

/// (3/4) prod (b_j+1)/b_j and (1/2) prod b_j/(b_j-1) for d >= 2, (1, 1) for d = 1.
GlobalBounds global_bounds(std::size_t d);

struct BoundsRow {
    std::size_t d;
    double lower;
    double upper;
    double guide;  ///< 1.5 + ln(d/2)
};

/// Streams one row per d = 1..d_max. Products accumulate as compensated log sums.
void bounds_table(std::size_t d_max, const std::function<void(const BoundsRow&)>& sink);

}  // namespace hgain
