#pragma once
// Normal density/CDF/quantile and the pluggable null-distribution evaluator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "claw/error.hpp"

namespace claw {

inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kInvSqrt2 = 0.7071067811865475244008444;

inline double normal_pdf(double x) {
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double normal_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z) / sd;
}

inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x * kInvSqrt2);
}

// Inverse normal CDF, Wichura's PPND16 rational approximation
// (~1 ulp over (0,1); used for inverse-transform sampling).
inline double normal_quantile(double p) {
    require(p > 0.0 && p < 1.0, ErrorCode::InvalidConfig, "normal_quantile needs p in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            q * (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                      6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                    1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                  1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
        const double den =
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
        return num / den;
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
              4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
              2.05319162663775882187e+0) * r + 1.0);
        value = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
              5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        value = num / den;
    }
    return (q < 0.0) ? -value : value;
}

// Analytic evaluator pair for the null distribution.
struct NullModel {
    std::function<double(double)> pdf;
    std::function<double(double)> cdf;
};

inline NullModel standard_normal_null() {
    return NullModel{[](double t) { return normal_pdf(t); },
                     [](double t) { return normal_cdf(t); }};
}

// Piecewise-linear CDF from tabulated (t, F) knots; density is the local slope.
// Outside the knot range the CDF saturates and the density is zero, so the
// table should cover the data range.
inline NullModel table_null(std::vector<std::pair<double, double>> knots) {
    require(knots.size() >= 2, ErrorCode::InvalidConfig, "table null needs at least 2 knots");
    for (std::size_t k = 0; k < knots.size(); ++k) {
        require(std::isfinite(knots[k].first) && std::isfinite(knots[k].second),
                ErrorCode::NonFiniteValue, "non-finite table knot");
        require(knots[k].second >= 0.0 && knots[k].second <= 1.0, ErrorCode::InvalidConfig,
                "table CDF value outside [0,1]");
        if (k > 0) {
            require(knots[k].first > knots[k - 1].first, ErrorCode::InvalidConfig,
                    "table abscissae must be strictly increasing");
            require(knots[k].second >= knots[k - 1].second, ErrorCode::InvalidConfig,
                    "table CDF must be non-decreasing");
        }
    }
    auto table = std::make_shared<const std::vector<std::pair<double, double>>>(std::move(knots));
    auto locate = [](const std::vector<std::pair<double, double>>& tab, double t) {
        return std::upper_bound(tab.begin(), tab.end(), t,
                                [](double v, const std::pair<double, double>& knot) {
                                    return v < knot.first;
                                });
    };
    NullModel model;
    model.cdf = [table, locate](double t) {
        const auto& tab = *table;
        auto it = locate(tab, t);
        if (it == tab.begin()) return tab.front().second;
        if (it == tab.end()) return tab.back().second;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        const double frac = (t - lo.first) / (hi.first - lo.first);
        return lo.second + frac * (hi.second - lo.second);
    };
    model.pdf = [table, locate](double t) {
        const auto& tab = *table;
        auto it = locate(tab, t);
        if (it == tab.begin() || it == tab.end()) return 0.0;
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        return (hi.second - lo.second) / (hi.first - lo.first);
    };
    return model;
}

}  // namespace claw
