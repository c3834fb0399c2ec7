#pragma once
// Conformalized locally adaptive estimators: pooled-sample bandwidth, the
// weighted density and proportion estimators, the Clfdr score and its
// monotone ranking transform.
//
// Swap invariance is exact, not just distributional: every estimator sums a
// per-unit symmetric bracket (kernel pair or indicator pair) before
// accumulating, and the bandwidth is computed from the sorted pooled sample.
// Swapping any (T_j, T_cal_j) therefore reproduces bit-identical outputs.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "claw/distributions.hpp"
#include "claw/error.hpp"
#include "claw/types.hpp"
#include "claw/weights.hpp"

namespace claw {

namespace detail {

// Type-7 quantile (linear interpolation between order statistics).
inline double quantile_sorted(const std::vector<double>& sorted, double p) {
    const std::size_t n = sorted.size();
    const double pos = p * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= n) return sorted[n - 1];
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double gauss_kernel(double diff, double inv_h, double norm) {
    const double z = diff * inv_h;
    return norm * std::exp(-0.5 * z * z);
}

}  // namespace detail

// h = 0.9 * min(sd, IQR/1.34) * n^(-1/5), computed on a sorted copy so any
// permutation of the input yields the same value.
inline double silverman_bandwidth(std::vector<double> values) {
    const std::size_t n = values.size();
    require(n >= 2, ErrorCode::DegenerateSample, "bandwidth needs at least 2 values");
    std::sort(values.begin(), values.end());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const double iqr = detail::quantile_sorted(values, 0.75) - detail::quantile_sorted(values, 0.25);
    const double spread = std::min(sd, iqr / 1.34);
    require(spread > 0.0, ErrorCode::DegenerateSample,
            "sample too degenerate for Silverman's rule; supply a fixed bandwidth");
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

// Weighted pooled kernel density over the paired test and calibration
// statistics. Integrates to 1 in t by construction.
inline double conformal_density(std::size_t i, double t, const Dataset& data,
                                const WeightMatrix& weights, double h) {
    require(h > 0.0, ErrorCode::InvalidConfig, "bandwidth must be positive");
    const std::size_t m = data.units.size();
    require(weights.size() == m, ErrorCode::LengthMismatch, "weight matrix size differs from m");
    const double mass = weights.row_sum(i);
    require(mass > 0.0, ErrorCode::ZeroWeightRow, "weight row has zero mass");
    const double inv_h = 1.0 / h;
    const double norm = kInvSqrt2Pi * inv_h;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double pair_term = detail::gauss_kernel(t - data.units[j].t, inv_h, norm) +
                                 detail::gauss_kernel(t - data.units[j].t_cal, inv_h, norm);
        acc += weights.at(i, j) * pair_term;
    }
    return acc / (2.0 * mass);
}

// Screening-count estimator of the local non-null proportion. May fall
// outside [0, 1/2]; see clamp_proportion.
inline double conformal_proportion(std::size_t i, std::span<const double> p_test,
                                   std::span<const double> p_cal, const WeightMatrix& weights,
                                   double lambda) {
    const std::size_t m = p_test.size();
    require(p_cal.size() == m && weights.size() == m, ErrorCode::LengthMismatch,
            "p-value vectors and weights must agree in length");
    require(lambda > 0.0 && lambda < 1.0, ErrorCode::InvalidConfig, "lambda must be in (0,1)");
    const double mass = weights.row_sum(i);
    require(mass > 0.0, ErrorCode::ZeroWeightRow, "weight row has zero mass");
    double count = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double pair_term =
            static_cast<double>((p_test[j] > lambda ? 1 : 0) + (p_cal[j] > lambda ? 1 : 0));
        count += weights.at(i, j) * pair_term;
    }
    return 1.0 - count / (2.0 * (1.0 - lambda) * mass);
}

// Clamp into [eps, 1/2]; a value of exactly 1/2 stays on the interior branch.
inline double clamp_proportion(double raw, double epsilon) {
    if (raw <= 0.0) return epsilon;
    if (raw > 0.5) return 0.5 - epsilon;
    return raw;
}

// min{(1 - pi) f0(t) / max(f_hat, floor), cap}; the floor guards the ratio,
// raw densities are never floored elsewhere.
inline double clfdr_score(double f0_at_t, double pi_tilde, double f_hat, double cap,
                          double floor) {
    return std::min((1.0 - pi_tilde) * f0_at_t / std::max(f_hat, floor), cap);
}

// Ranking transform: strictly increasing in clfdr for fixed pi_tilde.
inline double r_transform(double clfdr, double pi_tilde) {
    return (0.5 - pi_tilde) / (1.0 - pi_tilde) * (clfdr / (1.0 - clfdr));
}

inline double pvalue_from_null(double t, const std::function<double(double)>& null_cdf,
                               Sidedness sidedness) {
    const double cdf = null_cdf(t);
    switch (sidedness) {
        case Sidedness::left: return cdf;
        case Sidedness::right: return 1.0 - cdf;
        case Sidedness::two_sided: break;
    }
    return std::min(1.0, 2.0 * std::min(cdf, 1.0 - cdf));
}

// Per-unit estimator quantities produced by a pipeline run.
struct EstimatorState {
    double bandwidth = 0.0;
    std::vector<double> pi_raw;       // before clamping
    std::vector<double> pi_clamped;   // in [eps, 1/2]
    std::vector<double> weight_mass;  // sum_j w_ij
};

}  // namespace claw
