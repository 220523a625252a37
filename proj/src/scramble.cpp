#include "hgain/scramble.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "hgain/prf.hpp"

namespace hgain {

namespace {

std::uint64_t node_key(const ScrambleSpec& spec, std::size_t coord, std::size_t depth, std::uint64_t prefix) {
    return prf::derive_key({prf::kNestedTag, spec.seed, spec.replicate, coord, depth, prefix});
}

// pi(x) for the permutation that forward Fisher-Yates builds from `key`.
// Positions 0..x are final after step x, so later steps are skipped.
std::uint32_t permute_digit(std::uint64_t key, std::uint64_t base, std::uint32_t x) {
    thread_local std::vector<std::uint32_t> slots;
    thread_local std::vector<std::uint32_t> touched;
    if (slots.size() < base) {
        auto old = slots.size();
        slots.resize(base);
        std::iota(slots.begin() + std::ptrdiff_t(old), slots.end(), std::uint32_t(old));
    }
    prf::Stream stream(key);
    touched.clear();
    for (std::uint64_t i = 0; i <= x; ++i) {
        auto j = i + stream.below(base - i);
        std::swap(slots[i], slots[j]);
        touched.push_back(std::uint32_t(j));
    }
    std::uint32_t result = slots[x];
    for (std::uint64_t i = 0; i <= x; ++i) slots[i] = std::uint32_t(i);
    for (auto j : touched) slots[j] = j;
    return result;
}

// Tracks the integer value of the digit prefix, falling back to a hash chain
// once the value no longer fits in 64 bits (only past the default precision).
class PrefixKey {
public:
    explicit PrefixKey(std::uint64_t base) : base_(base) {}

    std::uint64_t value() const { return exact_ ? value_ : hash_; }

    void push(std::uint32_t digit) {
        if (exact_) {
            u128 next = u128(value_) + u128(digit) * scale_;
            u128 next_scale = scale_ * base_;
            if (next > std::numeric_limits<std::uint64_t>::max() ||
                next_scale > u128(std::numeric_limits<std::uint64_t>::max()) + 1) {
                exact_ = false;
                hash_ = prf::mix(~std::uint64_t(next));
            } else {
                value_ = std::uint64_t(next);
                scale_ = next_scale;
            }
        } else {
            hash_ = prf::mix(hash_ ^ prf::mix(digit));
        }
    }

private:
    std::uint64_t base_;
    bool exact_ = true;
    std::uint64_t value_ = 0;
    u128 scale_ = 1;
    std::uint64_t hash_ = 0;
};

}  // namespace

std::string to_string(ScrambleKind kind) {
    switch (kind) {
        case ScrambleKind::none: return "none";
        case ScrambleKind::nested_uniform: return "nested";
        case ScrambleKind::linear_digital_shift: return "linear";
    }
    return "none";
}

ScrambleKind parse_scramble_kind(const std::string& text) {
    if (text == "none") return ScrambleKind::none;
    if (text == "nested" || text == "nested-uniform") return ScrambleKind::nested_uniform;
    if (text == "linear" || text == "linear-digital-shift") return ScrambleKind::linear_digital_shift;
    throw std::invalid_argument("unknown scramble kind '" + text + "'");
}

std::size_t ScrambleSpec::depth(std::size_t coord, std::size_t stored) const {
    if (coord < precision.size() && precision[coord] != 0) return std::min(precision[coord], stored);
    return stored;
}

LinearScramble::LinearScramble(std::uint64_t base, std::vector<std::vector<std::uint32_t>> rows,
                               std::vector<std::uint32_t> shift)
    : base_(base), rows_(std::move(rows)), shift_(std::move(shift)) {
    if (rows_.size() != shift_.size()) throw std::invalid_argument("matrix and shift depth differ");
    for (std::size_t s = 0; s < rows_.size(); ++s) {
        if (rows_[s].size() != s + 1) throw std::invalid_argument("matrix must be lower triangular");
        if (rows_[s][s] == 0) throw std::invalid_argument("matrix diagonal must be nonzero");
        for (auto e : rows_[s])
            if (e >= base_) throw std::invalid_argument("matrix entry out of range");
        if (shift_[s] >= base_) throw std::invalid_argument("shift digit out of range");
    }
}

LinearScramble LinearScramble::draw(std::uint64_t base, std::size_t depth, const ScrambleSpec& spec,
                                    std::size_t coord) {
    std::vector<std::vector<std::uint32_t>> rows(depth);
    std::vector<std::uint32_t> shift(depth);
    auto stream_at = [&](std::size_t s, std::size_t t) {
        return prf::Stream(prf::derive_key({prf::kLinearTag, spec.seed, spec.replicate, coord, s, t}));
    };
    for (std::size_t s = 1; s <= depth; ++s) {
        rows[s - 1].resize(s);
        for (std::size_t t = 1; t < s; ++t) rows[s - 1][t - 1] = std::uint32_t(stream_at(s, t).below(base));
        rows[s - 1][s - 1] = std::uint32_t(1 + stream_at(s, s).below(base - 1));
        shift[s - 1] = std::uint32_t(stream_at(s, 0).below(base));
    }
    return LinearScramble(base, std::move(rows), std::move(shift));
}

LinearScramble LinearScramble::identity(std::uint64_t base, std::size_t depth) {
    std::vector<std::vector<std::uint32_t>> rows(depth);
    for (std::size_t s = 0; s < depth; ++s) {
        rows[s].assign(s + 1, 0);
        rows[s][s] = 1;
    }
    return LinearScramble(base, std::move(rows), std::vector<std::uint32_t>(depth, 0));
}

PermutationNode permutation_node(const ScrambleSpec& spec, std::size_t coord, std::uint64_t base, std::size_t depth,
                                 std::uint64_t prefix) {
    std::vector<std::uint32_t> perm(base);
    std::iota(perm.begin(), perm.end(), 0u);
    prf::Stream stream(node_key(spec, coord, depth, prefix));
    for (std::uint64_t i = 0; i < base; ++i) std::swap(perm[i], perm[i + stream.below(base - i)]);
    return {base, depth, prefix, std::move(perm)};
}

DigitVector nested_scramble_digits(const DigitVector& x, std::size_t coord, const ScrambleSpec& spec) {
    if (spec.kind == ScrambleKind::none) return x;
    if (spec.kind != ScrambleKind::nested_uniform) throw std::invalid_argument("spec is not a nested scramble");
    const std::size_t depth = spec.depth(coord, x.precision());
    const auto in = x.digits();
    std::vector<std::uint32_t> out(depth);
    PrefixKey prefix(x.base());
    for (std::size_t s = 1; s <= depth; ++s) {
        out[s - 1] = permute_digit(node_key(spec, coord, s, prefix.value()), x.base(), in[s - 1]);
        prefix.push(in[s - 1]);
    }
    return DigitVector(x.base(), std::move(out));
}

DigitVector linear_scramble_digits(const DigitVector& x, const LinearScramble& scramble) {
    if (scramble.base() != x.base()) throw std::invalid_argument("scramble base differs from digit base");
    if (scramble.depth() < x.precision()) throw PrecisionError("linear scramble shallower than digit vector");
    const std::uint64_t b = x.base();
    const auto in = x.digits();
    std::vector<std::uint32_t> out(x.precision());
    for (std::size_t s = 1; s <= out.size(); ++s) {
        u128 acc = scramble.shift(s);
        for (std::size_t t = 1; t <= s; ++t) acc = (acc + u128(scramble.entry(s, t)) * in[t - 1]) % b;
        out[s - 1] = std::uint32_t(acc);
    }
    return DigitVector(b, std::move(out));
}

PointSet randomize(const PointSet& points, const ScrambleSpec& spec) {
    if (spec.kind == ScrambleKind::none) return points;
    const std::size_t d = points.dimension();
    std::vector<std::uint64_t> bases(d);
    std::vector<std::size_t> depth(d);
    for (std::size_t c = 0; c < d; ++c) {
        bases[c] = points.base(c);
        depth[c] = spec.depth(c, points.precision(c));
    }
    PointSet out(bases, depth, points.start(), points.count());

    for (std::size_t c = 0; c < d; ++c) {
        const std::uint64_t b = bases[c];
        std::optional<LinearScramble> linear;
        if (spec.kind == ScrambleKind::linear_digital_shift) linear = LinearScramble::draw(b, depth[c], spec, c);

        for (std::size_t row = 0; row < points.count(); ++row) {
            auto in = points.digits(row, c).first(depth[c]);
            auto dst = out.mutable_digits(row, c);
            double tail = 0.0;
            if (linear) {
                DigitVector y = linear_scramble_digits(DigitVector(b, {in.begin(), in.end()}), *linear);
                std::copy(y.digits().begin(), y.digits().end(), dst.begin());
            } else {
                PrefixKey prefix(b);
                for (std::size_t s = 1; s <= depth[c]; ++s) {
                    dst[s - 1] = permute_digit(node_key(spec, c, s, prefix.value()), b, in[s - 1]);
                    prefix.push(in[s - 1]);
                }
                // Digits below the scramble depth are fresh uniform draws.
                tail = prf::Stream(prf::derive_key({prf::kNestedTailTag, spec.seed, spec.replicate, c, depth[c],
                                                    prefix.value()}))
                           .uniform01();
            }
            out.set_coordinate(row, c, realize(dst, b, tail));
        }
    }
    return out;
}

}  // namespace hgain
