#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hgain/halton.hpp"

namespace hgain {

enum class ScrambleKind { none, nested_uniform, linear_digital_shift };

std::string to_string(ScrambleKind kind);
/// Accepts "none", "nested" and "linear" (and the long names).
ScrambleKind parse_scramble_kind(const std::string& text);

/// What randomization to apply and which random stream to use.
///
/// (seed, replicate, coordinate) determine every random choice, so replicates
/// can be generated in any order or in parallel.
struct ScrambleSpec {
    ScrambleKind kind = ScrambleKind::none;
    std::uint64_t seed = 0;
    std::uint64_t replicate = 0;
    /// Optional per-coordinate scramble depth; zero or missing means the
    /// coordinate's full stored precision.
    std::vector<std::size_t> precision;

    std::size_t depth(std::size_t coord, std::size_t stored) const;
};

/// Random lower-triangular digit matrix with nonzero diagonal plus a digit shift.
class LinearScramble {
public:
    /// Draws entries for coordinate `coord` (zero-based) from the keyed stream.
    /// Entry (s, t) depends only on its own address, so leading rows do not
    /// change with depth.
    static LinearScramble draw(std::uint64_t base, std::size_t depth, const ScrambleSpec& spec, std::size_t coord);
    static LinearScramble identity(std::uint64_t base, std::size_t depth);

    /// rows[s-1] holds l_{s,1..s}; shift[s-1] holds e_s.
    LinearScramble(std::uint64_t base, std::vector<std::vector<std::uint32_t>> rows, std::vector<std::uint32_t> shift);

    std::uint64_t base() const { return base_; }
    std::size_t depth() const { return shift_.size(); }
    std::uint32_t entry(std::size_t s, std::size_t t) const { return t > s ? 0 : rows_[s - 1][t - 1]; }
    std::uint32_t shift(std::size_t s) const { return shift_[s - 1]; }

private:
    std::uint64_t base_;
    std::vector<std::vector<std::uint32_t>> rows_;
    std::vector<std::uint32_t> shift_;
};

/// The uniform permutation of Z_b attached to one node of the nested scramble
/// tree: coordinate, depth s (1-based) and the integer value of the length
/// s-1 digit prefix (sum_t x_t b^{t-1}).
struct PermutationNode {
    std::uint64_t base;
    std::size_t depth;
    std::uint64_t prefix;
    std::vector<std::uint32_t> permutation;
};

PermutationNode permutation_node(const ScrambleSpec& spec, std::size_t coord, std::uint64_t base, std::size_t depth,
                                 std::uint64_t prefix);

/// Scrambles the first spec.depth(coord, x.precision()) digits of x with the
/// nested uniform scramble. With kind none the input is returned unchanged.
DigitVector nested_scramble_digits(const DigitVector& x, std::size_t coord, const ScrambleSpec& spec);

/// y_s = (sum_{t<=s} l_{s,t} x_t + e_s) mod b.
DigitVector linear_scramble_digits(const DigitVector& x, const LinearScramble& scramble);

/// Scrambles every coordinate of every point in its own base. Row order is kept.
PointSet randomize(const PointSet& points, const ScrambleSpec& spec);

}  // namespace hgain
