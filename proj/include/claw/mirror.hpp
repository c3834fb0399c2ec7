#pragma once
// Decision engine: the Q(t) mirror process, its threshold, the rejection set,
// generalized e-values and e-BH.
//
// Q(t) = (1 + #{cal score <= t and below its test score})
//      / max(1, #{test score <= t and below its cal score})
// and tau is the largest candidate in {nu_i} = {min(u_i, u~_i)} with
// Q(t) <= alpha. Q only jumps at nu values, so scanning {nu_i} yields the
// same rejections as scanning all scores.
//
// Exact ties u_i = u~_i (probability zero in theory, possible in floating
// point) are excluded from both counts and can never be rejected; this is
// strictly conservative and keeps the procedure randomization-free.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "claw/error.hpp"
#include "claw/types.hpp"

namespace claw {

struct MirrorDiagnostics {
    std::vector<double> nu;          // min(u_i, u~_i)
    std::vector<std::uint8_t> eta;   // I{u_i < u~_i}
    IndexSet ties;                   // indices with u_i == u~_i
};

namespace detail {

inline void check_scores(std::span<const double> u, std::span<const double> u_tilde) {
    require(u.size() == u_tilde.size(), ErrorCode::LengthMismatch,
            "score vectors differ in length");
    require(!u.empty(), ErrorCode::EmptyInput, "score vectors are empty");
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (std::isnan(u[i]) || std::isnan(u_tilde[i])) {
            raise(ErrorCode::NonFiniteValue, "NaN score at unit " + std::to_string(i));
        }
    }
}

}  // namespace detail

inline MirrorDiagnostics mirror_diagnostics(std::span<const double> u,
                                            std::span<const double> u_tilde) {
    detail::check_scores(u, u_tilde);
    MirrorDiagnostics d;
    d.nu.resize(u.size());
    d.eta.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        d.nu[i] = std::min(u[i], u_tilde[i]);
        d.eta[i] = u[i] < u_tilde[i] ? 1 : 0;
        if (u[i] == u_tilde[i]) d.ties.push_back(i);
    }
    return d;
}

// O(m log m) sweep over the sorted nu candidates with running counts;
// Q is evaluated after absorbing every unit at a shared candidate value.
inline double mirror_threshold(std::span<const double> u, std::span<const double> u_tilde,
                               double alpha) {
    detail::check_scores(u, u_tilde);
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1]");
    const std::size_t m = u.size();
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> nu(m);
    for (std::size_t i = 0; i < m; ++i) nu[i] = std::min(u[i], u_tilde[i]);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return nu[a] < nu[b]; });

    double tau = kNoThreshold;
    std::size_t mirror_count = 0;  // cal side
    std::size_t reject_count = 0;  // test side
    std::size_t k = 0;
    while (k < m) {
        const double value = nu[order[k]];
        while (k < m && nu[order[k]] == value) {
            const std::size_t i = order[k];
            if (u[i] < u_tilde[i]) {
                ++reject_count;
            } else if (u_tilde[i] < u[i]) {
                ++mirror_count;
            }
            ++k;
        }
        const double q = (1.0 + static_cast<double>(mirror_count)) /
                         static_cast<double>(std::max<std::size_t>(1, reject_count));
        if (q <= alpha) tau = value;
    }
    return tau;
}

inline IndexSet reject_set(std::span<const double> u, std::span<const double> u_tilde,
                           double tau) {
    detail::check_scores(u, u_tilde);
    IndexSet rejected;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (u[i] < u_tilde[i] && u[i] <= tau) rejected.push_back(i);
    }
    return rejected;
}

// e_j = m * I{u_j rejected at tau} / (1 + mirror count at tau): every nonzero
// entry equals m/(1+C) for the single shared count C.
inline std::vector<double> evalues(std::span<const double> u, std::span<const double> u_tilde,
                                   double tau) {
    detail::check_scores(u, u_tilde);
    const std::size_t m = u.size();
    std::size_t mirror_count = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (u_tilde[i] < u[i] && u_tilde[i] <= tau) ++mirror_count;
    }
    const double value =
        static_cast<double>(m) / (1.0 + static_cast<double>(mirror_count));
    std::vector<double> e(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (u[i] < u_tilde[i] && u[i] <= tau) e[i] = value;
    }
    return e;
}

// e-BH: sort descending, k = max{i : i * e_(i) / m >= 1/alpha}, reject
// everything at or above the k-th order statistic.
//
// The comparison carries a few-ulp relative slack. The canonical e-values
// m/(1+C) make i * e_(i) / m a small-integer ratio that often lands exactly
// on 1/alpha; without the slack, compounded rounding can drop such boundary
// cases that real arithmetic (and the mirror threshold) accepts.
inline IndexSet ebh(std::span<const double> e, double alpha) {
    require(alpha > 0.0 && alpha <= 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1]");
    const std::size_t m = e.size();
    for (std::size_t i = 0; i < m; ++i) {
        require(std::isfinite(e[i]) && e[i] >= 0.0, ErrorCode::NonFiniteValue,
                "e-values must be finite and non-negative");
    }
    std::vector<double> sorted(e.begin(), e.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());
    const double bar =
        (1.0 / alpha) * (1.0 - 8.0 * std::numeric_limits<double>::epsilon());
    std::size_t khat = 0;
    for (std::size_t i = 1; i <= m; ++i) {
        if (static_cast<double>(i) * sorted[i - 1] / static_cast<double>(m) >= bar) khat = i;
    }
    IndexSet rejected;
    if (khat == 0) return rejected;
    const double threshold = sorted[khat - 1];
    for (std::size_t i = 0; i < m; ++i) {
        if (e[i] >= threshold) rejected.push_back(i);
    }
    return rejected;
}

}  // namespace claw
