#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hgain/gains.hpp"
#include "hgain/halton.hpp"
#include "hgain/primes.hpp"
#include "hgain/rational.hpp"
#include "hgain/scramble.hpp"

namespace hgain {

/// f(x) = prod_{j in u} eta_j(digit k_j + 1 of x_j).
///
/// Each eta_j sums to zero, so f has mean zero and its whole variance sits in
/// the single component (u, k).
class HaarIntegrand {
public:
    /// eta[t] is the table of the t-th smallest member of u and must have b_j
    /// entries summing to zero with at least one nonzero entry.
    static HaarIntegrand make(CoordSubset u, std::vector<unsigned> levels, const PrimeBasis& basis,
                              std::vector<std::vector<Rational>> eta);

    /// Tables (-1, ..., -1, b - 1) for every member.
    static HaarIntegrand make_default(CoordSubset u, std::vector<unsigned> levels, const PrimeBasis& basis);

    CoordSubset subset() const { return u_; }
    std::span<const unsigned> coordinates() const { return coords_; }
    std::span<const unsigned> levels() const { return levels_; }
    std::span<const std::uint64_t> bases() const { return bases_; }
    const std::vector<double>& table(std::size_t t) const { return eta_[t]; }

    double mean() const { return 0.0; }
    const Rational& sigma2_exact() const { return sigma2_exact_; }
    double sigma2() const { return sigma2_; }

private:
    HaarIntegrand() = default;
    CoordSubset u_;
    std::vector<unsigned> coords_;
    std::vector<unsigned> levels_;
    std::vector<std::uint64_t> bases_;
    std::vector<std::vector<double>> eta_;
    Rational sigma2_exact_;
    double sigma2_ = 0;
};

/// Evaluates f from digits. point[c] holds coordinate c + 1.
double evaluate(const HaarIntegrand& f, std::span<const DigitVector> point);
double evaluate(const HaarIntegrand& f, const PointSet& points, std::size_t row);

struct EstimateSummary {
    std::uint64_t n = 0;
    std::size_t replicates = 0;
    std::vector<double> replicate_means;
    double mean = 0;
    double variance = 0;      ///< sample variance of the replicate means
    double sigma2 = 0;
    double mc_variance = 0;   ///< sigma^2 / n
    double empirical_gain = 0;
    double gain_std_error = 0;
};

/// Summarizes replicate means of an estimator of a mean-zero integrand.
EstimateSummary summarize(std::vector<double> replicate_means, std::uint64_t n, double sigma2);

/// R independent randomizations of the first n Halton points; replicate r
/// uses spec.replicate + r.
EstimateSummary rqmc_estimate(const HaarIntegrand& f, const PrimeBasis& basis, std::uint64_t n,
                              std::size_t replicates, const ScrambleSpec& spec, unsigned threads = 0);

/// Plain Monte Carlo with IID uniform points.
EstimateSummary mc_estimate(const HaarIntegrand& f, const PrimeBasis& basis, std::uint64_t n,
                            std::size_t replicates, std::uint64_t seed, unsigned threads = 0);

}  // namespace hgain
