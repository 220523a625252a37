#include "hgain/rqmc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hgain/parallel.hpp"
#include "hgain/prf.hpp"

namespace hgain {

namespace {

constexpr std::uint64_t kMaxExactFloatCount = std::uint64_t{1} << 53;

void check_sizes(std::uint64_t n, std::size_t replicates) {
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    if (n > kMaxExactFloatCount) throw std::invalid_argument("sample size above 2^53");
    if (replicates < 2) throw std::invalid_argument("at least two replicates are needed for a variance");
}

}  // namespace

HaarIntegrand HaarIntegrand::make(CoordSubset u, std::vector<unsigned> levels, const PrimeBasis& basis,
                                  std::vector<std::vector<Rational>> eta) {
    if (u.empty()) throw std::invalid_argument("integrand needs a nonempty coordinate set");
    if (u.max_coordinate() > basis.dimension()) throw std::invalid_argument("coordinate exceeds basis dimension");
    if (levels.size() != u.size() || eta.size() != u.size())
        throw std::invalid_argument("one level and one table per coordinate of u required");

    HaarIntegrand f;
    f.u_ = u;
    f.coords_ = u.members();
    f.levels_ = std::move(levels);
    f.sigma2_exact_ = Rational(1);
    for (std::size_t t = 0; t < f.coords_.size(); ++t) {
        const std::uint64_t b = basis.base(f.coords_[t]);
        const auto& table = eta[t];
        if (table.size() != b)
            throw std::invalid_argument("table for coordinate " + std::to_string(f.coords_[t]) + " needs " +
                                        std::to_string(b) + " entries");
        Rational sum(0), sum_sq(0);
        bool nonzero = false;
        for (const auto& e : table) {
            sum += e;
            sum_sq += e * e;
            nonzero = nonzero || !e.is_zero();
        }
        if (!sum.is_zero()) throw std::invalid_argument("table entries must sum to zero");
        if (!nonzero) throw std::invalid_argument("table must have a nonzero entry");
        f.sigma2_exact_ *= sum_sq / Rational(i128(b));
        f.bases_.push_back(b);
        std::vector<double> values;
        for (const auto& e : table) values.push_back(e.to_double());
        f.eta_.push_back(std::move(values));
    }
    f.sigma2_ = f.sigma2_exact_.to_double();
    return f;
}

HaarIntegrand HaarIntegrand::make_default(CoordSubset u, std::vector<unsigned> levels, const PrimeBasis& basis) {
    std::vector<std::vector<Rational>> eta;
    for (unsigned j : u.members()) {
        if (j > basis.dimension()) throw std::invalid_argument("coordinate exceeds basis dimension");
        const std::uint64_t b = basis.base(j);
        std::vector<Rational> table(b, Rational(-1));
        table.back() = Rational(i128(b - 1));
        eta.push_back(std::move(table));
    }
    return make(u, std::move(levels), basis, std::move(eta));
}

double evaluate(const HaarIntegrand& f, std::span<const DigitVector> point) {
    double value = 1.0;
    for (std::size_t t = 0; t < f.coordinates().size(); ++t) {
        const std::size_t c = f.coordinates()[t] - 1;
        if (c >= point.size()) throw std::invalid_argument("point lacks coordinate " + std::to_string(c + 1));
        value *= f.table(t)[point[c].digit(f.levels()[t] + 1)];
    }
    return value;
}

double evaluate(const HaarIntegrand& f, const PointSet& points, std::size_t row) {
    double value = 1.0;
    for (std::size_t t = 0; t < f.coordinates().size(); ++t) {
        const std::size_t c = f.coordinates()[t] - 1;
        if (c >= points.dimension()) throw std::invalid_argument("point lacks coordinate " + std::to_string(c + 1));
        const std::size_t l = f.levels()[t] + 1;
        auto digits = points.digits(row, c);
        if (digits.size() < l) throw PrecisionError("point precision below integrand level");
        value *= f.table(t)[digits[l - 1]];
    }
    return value;
}

EstimateSummary summarize(std::vector<double> replicate_means, std::uint64_t n, double sigma2) {
    const std::size_t reps = replicate_means.size();
    if (reps < 2) throw std::invalid_argument("at least two replicates are needed for a variance");
    EstimateSummary s;
    s.n = n;
    s.replicates = reps;
    s.sigma2 = sigma2;
    s.mc_variance = sigma2 / double(n);

    double sum = 0;
    for (double x : replicate_means) sum += x;
    s.mean = sum / double(reps);
    double m2 = 0, m4 = 0;
    for (double x : replicate_means) {
        const double dev2 = (x - s.mean) * (x - s.mean);
        m2 += dev2;
        m4 += dev2 * dev2;
    }
    s.variance = m2 / double(reps - 1);
    m4 /= double(reps);
    // Large-sample variance of the sample variance, using the empirical fourth moment.
    const double r = double(reps);
    const double var_of_var = std::max(0.0, (m4 - s.variance * s.variance * (r - 3) / (r - 1)) / r);
    s.empirical_gain = double(n) * s.variance / sigma2;
    s.gain_std_error = double(n) * std::sqrt(var_of_var) / sigma2;
    s.replicate_means = std::move(replicate_means);
    return s;
}

EstimateSummary rqmc_estimate(const HaarIntegrand& f, const PrimeBasis& basis, std::uint64_t n,
                              std::size_t replicates, const ScrambleSpec& spec, unsigned threads) {
    check_sizes(n, replicates);
    const auto coords = f.coordinates();
    const auto levels = f.levels();
    if (coords.back() > basis.dimension()) throw std::invalid_argument("integrand coordinate exceeds basis dimension");

    // Only digits 1..k+1 reach the integrand, and scrambled digit s depends on
    // input digits 1..s alone, so inputs are kept at depth k+1.
    std::vector<std::vector<DigitVector>> inputs(coords.size());
    for (std::size_t t = 0; t < coords.size(); ++t) {
        const std::uint64_t b = basis.base(coords[t]);
        const std::size_t depth = levels[t] + 1;
        const std::size_t precision = std::max<std::size_t>(default_precision(b), depth);
        inputs[t].reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) inputs[t].push_back(digits_of(i, b, precision).leading(depth));
    }

    std::vector<double> means(replicates);
    parallel_chunks(replicates, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t r = begin; r < end; ++r) {
            ScrambleSpec rep = spec;
            rep.replicate = spec.replicate + r;
            std::vector<LinearScramble> linear;
            if (spec.kind == ScrambleKind::linear_digital_shift)
                for (std::size_t t = 0; t < coords.size(); ++t)
                    linear.push_back(
                        LinearScramble::draw(basis.base(coords[t]), levels[t] + 1, rep, coords[t] - 1));

            double sum = 0;
            for (std::uint64_t i = 0; i < n; ++i) {
                double value = 1.0;
                for (std::size_t t = 0; t < coords.size(); ++t) {
                    const DigitVector& x = inputs[t][i];
                    DigitVector y = linear.empty() ? nested_scramble_digits(x, coords[t] - 1, rep)
                                                   : linear_scramble_digits(x, linear[t]);
                    if (y.precision() <= levels[t]) throw PrecisionError("scramble depth below integrand level");
                    value *= f.table(t)[y.digit(levels[t] + 1)];
                }
                sum += value;
            }
            means[r] = sum / double(n);
        }
    });
    return summarize(std::move(means), n, f.sigma2());
}

EstimateSummary mc_estimate(const HaarIntegrand& f, const PrimeBasis& basis, std::uint64_t n,
                            std::size_t replicates, std::uint64_t seed, unsigned threads) {
    check_sizes(n, replicates);
    if (f.coordinates().back() > basis.dimension())
        throw std::invalid_argument("integrand coordinate exceeds basis dimension");
    // Digits of an IID uniform coordinate are IID uniform, so only the digit
    // the integrand reads is drawn.
    std::vector<double> means(replicates);
    parallel_chunks(replicates, threads, [&](std::size_t begin, std::size_t end, std::size_t) {
        for (std::size_t r = begin; r < end; ++r) {
            double sum = 0;
            for (std::uint64_t i = 0; i < n; ++i) {
                prf::Stream stream(prf::derive_key({prf::kMonteCarloTag, seed, r, i}));
                double value = 1.0;
                for (std::size_t t = 0; t < f.coordinates().size(); ++t) value *= f.table(t)[stream.below(f.bases()[t])];
                sum += value;
            }
            means[r] = sum / double(n);
        }
    });
    return summarize(std::move(means), n, f.sigma2());
}

}  // namespace hgain
