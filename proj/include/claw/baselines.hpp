#pragma once
// Reference procedures: BH, Storey's estimator and Storey-BH, conformal
// p-values, and the counting form of conformal BH, plus the pooled/separate
// grouped drivers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "claw/error.hpp"
#include "claw/types.hpp"

namespace claw {

namespace detail {

inline void check_pvalues(std::span<const double> p) {
    for (double v : p) {
        require(std::isfinite(v) && v >= 0.0 && v <= 1.0, ErrorCode::InvalidConfig,
                "p-values must lie in [0,1]");
    }
}

}  // namespace detail

namespace detail {

inline IndexSet bh_step_up(std::span<const double> p, double level) {
    check_pvalues(p);
    const std::size_t m = p.size();
    std::vector<double> sorted(p.begin(), p.end());
    std::sort(sorted.begin(), sorted.end());
    double threshold = -1.0;
    for (std::size_t k = m; k >= 1; --k) {
        if (sorted[k - 1] <= static_cast<double>(k) * level / static_cast<double>(m)) {
            threshold = sorted[k - 1];
            break;
        }
    }
    IndexSet rejected;
    if (threshold < 0.0) return rejected;
    for (std::size_t i = 0; i < m; ++i) {
        if (p[i] <= threshold) rejected.push_back(i);
    }
    return rejected;
}

}  // namespace detail

// Step-up BH at level alpha; with ties at the boundary every tied p-value is
// rejected (the step-up index extends past them).
inline IndexSet bh(std::span<const double> p, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1)");
    return detail::bh_step_up(p, alpha);
}

// Storey's null-proportion estimator with the conventional 1/m normalization,
// clamped into [0, 1 - 1/m].
inline double storey_pi(std::span<const double> p, double lambda) {
    require(lambda > 0.0 && lambda < 1.0, ErrorCode::InvalidConfig, "lambda must be in (0,1)");
    detail::check_pvalues(p);
    require(!p.empty(), ErrorCode::EmptyInput, "empty p-value set");
    const double m = static_cast<double>(p.size());
    double surviving = 0.0;
    for (double v : p) {
        if (v > lambda) surviving += 1.0;
    }
    const double raw = 1.0 - surviving / ((1.0 - lambda) * m);
    return std::clamp(raw, 0.0, 1.0 - 1.0 / m);
}

// BH at the adjusted level alpha/(1 - pi_hat), capped at 1.
inline IndexSet storey_bh(std::span<const double> p, double alpha, double lambda) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1)");
    const double pi_hat = storey_pi(p, lambda);
    const double adjusted = std::min(alpha / (1.0 - pi_hat), 1.0);
    return detail::bh_step_up(p, adjusted);
}

// Standardized rank of each test score within the calibration scores.
inline std::vector<double> conformal_pvalues(std::span<const double> test_scores,
                                             std::span<const double> cal_scores) {
    require(!cal_scores.empty(), ErrorCode::EmptyCalibration, "calibration scores are empty");
    std::vector<double> sorted_cal(cal_scores.begin(), cal_scores.end());
    std::sort(sorted_cal.begin(), sorted_cal.end());
    const double denom = 1.0 + static_cast<double>(sorted_cal.size());
    std::vector<double> p(test_scores.size());
    for (std::size_t i = 0; i < test_scores.size(); ++i) {
        const auto count = std::upper_bound(sorted_cal.begin(), sorted_cal.end(), test_scores[i]) -
                           sorted_cal.begin();
        p[i] = (1.0 + static_cast<double>(count)) / denom;
    }
    return p;
}

struct CbhResult {
    double threshold = kNoThreshold;
    IndexSet rejected;
};

// Counting form of conformal BH: largest test score t with
// Q*(t) = [(1 + #{cal <= t}) / (1 + n_cal)] / [#{test <= t} / m] <= alpha.
inline CbhResult cbh_threshold(std::span<const double> test_scores,
                               std::span<const double> cal_scores, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1)");
    require(!cal_scores.empty(), ErrorCode::EmptyCalibration, "calibration scores are empty");
    require(!test_scores.empty(), ErrorCode::EmptyInput, "test scores are empty");
    const std::size_t m = test_scores.size();
    std::vector<double> sorted_test(test_scores.begin(), test_scores.end());
    std::sort(sorted_test.begin(), sorted_test.end());
    std::vector<double> sorted_cal(cal_scores.begin(), cal_scores.end());
    std::sort(sorted_cal.begin(), sorted_cal.end());
    const double cal_denom = 1.0 + static_cast<double>(sorted_cal.size());

    CbhResult result;
    std::size_t cal_below = 0;
    for (std::size_t k = 0; k < m; ++k) {
        const double t = sorted_test[k];
        if (k + 1 < m && sorted_test[k + 1] == t) continue;  // evaluate once per value
        while (cal_below < sorted_cal.size() && sorted_cal[cal_below] <= t) ++cal_below;
        const double fdp_hat = ((1.0 + static_cast<double>(cal_below)) / cal_denom) /
                               (static_cast<double>(k + 1) / static_cast<double>(m));
        if (fdp_hat <= alpha) result.threshold = t;
    }
    if (result.threshold != kNoThreshold) {
        for (std::size_t i = 0; i < m; ++i) {
            if (test_scores[i] <= result.threshold) result.rejected.push_back(i);
        }
    }
    return result;
}

// Separate-analysis driver: run `analyze` once per covariate group at the
// same level and union the rejections. `analyze` receives the member indices
// of one group and returns positions into that vector.
inline IndexSet separate_by_group(
    const std::vector<std::string>& labels,
    const std::function<IndexSet(const std::vector<std::size_t>&)>& analyze) {
    require(!labels.empty(), ErrorCode::EmptyInput, "no group labels");
    std::vector<std::string> seen;
    IndexSet rejected;
    for (const std::string& label : labels) {
        if (std::find(seen.begin(), seen.end(), label) != seen.end()) continue;
        seen.push_back(label);
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == label) members.push_back(i);
        }
        for (std::size_t pos : analyze(members)) {
            require(pos < members.size(), ErrorCode::IndexOutOfRange,
                    "group analysis returned an out-of-range position");
            rejected.push_back(members[pos]);
        }
    }
    std::sort(rejected.begin(), rejected.end());
    return rejected;
}

inline IndexSet separate_bh(std::span<const double> p, const std::vector<std::string>& labels,
                            double alpha) {
    require(p.size() == labels.size(), ErrorCode::LengthMismatch,
            "p-values and labels differ in length");
    return separate_by_group(labels, [&](const std::vector<std::size_t>& members) {
        std::vector<double> local(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) local[k] = p[members[k]];
        return bh(local, alpha);
    });
}

inline IndexSet separate_cbh(std::span<const double> test_scores,
                             std::span<const double> cal_scores,
                             const std::vector<std::string>& labels, double alpha) {
    require(test_scores.size() == labels.size() && cal_scores.size() == labels.size(),
            ErrorCode::LengthMismatch, "scores and labels differ in length");
    return separate_by_group(labels, [&](const std::vector<std::size_t>& members) {
        std::vector<double> local_test(members.size());
        std::vector<double> local_cal(members.size());
        for (std::size_t k = 0; k < members.size(); ++k) {
            local_test[k] = test_scores[members[k]];
            local_cal[k] = cal_scores[members[k]];
        }
        return cbh_threshold(local_test, local_cal, alpha).rejected;
    });
}

}  // namespace claw
