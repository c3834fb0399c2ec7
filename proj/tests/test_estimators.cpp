#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "claw/distributions.hpp"
#include "claw/estimators.hpp"
#include "claw/rng.hpp"
#include "claw/weights.hpp"

using namespace claw;

namespace {

double gauss_density(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// Hand-evaluated Silverman oracle for the worked example (-1, 0, 1, 2):
// sd = sqrt(5/3), type-7 quartiles give IQR = 1.5, n = 4.
double silverman_example_oracle() {
    const double sd = std::sqrt(5.0 / 3.0);
    const double iqr = 1.25 - (-0.25);
    const double spread = std::min(sd, iqr / 1.34);
    return 0.9 * spread * std::pow(4.0, -0.2);
}

Dataset single_unit(double t, double t_cal) {
    Dataset d;
    d.units.push_back({t, Covariate::category("g"), t_cal});
    return d;
}

}  // namespace

TEST_CASE("Silverman bandwidth matches the hand-evaluated oracle", "[estimators]") {
    const double h = silverman_bandwidth({-1.0, 0.0, 1.0, 2.0});
    CHECK(h == Catch::Approx(silverman_example_oracle()).epsilon(1e-14));
    CHECK(h == Catch::Approx(0.7635).margin(5e-4));

    SECTION("permutation invariance is exact") {
        std::vector<double> values = {0.3, -1.2, 4.5, 0.3, 2.2, -0.7, 1.1};
        const double reference = silverman_bandwidth(values);
        std::sort(values.begin(), values.end());
        do {
            CHECK(silverman_bandwidth(values) == reference);
        } while (std::next_permutation(values.begin(), values.end()));
    }
    SECTION("degenerate samples are rejected") {
        CHECK_THROWS_AS(silverman_bandwidth({1.0, 1.0, 1.0}), Error);
        CHECK_THROWS_AS(silverman_bandwidth({2.0}), Error);
        // IQR zero with positive sd is still unusable.
        CHECK_THROWS_AS(silverman_bandwidth({0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 2.0}), Error);
    }
}

TEST_CASE("conformal density matches the two-term oracle", "[estimators]") {
    const Dataset d = single_unit(0.0, 2.0);
    const WeightMatrix w = group_weights(covariates_of(d));
    const double value = conformal_density(0, 0.0, d, w, 1.0);
    CHECK(value == Catch::Approx((gauss_density(0.0) + gauss_density(2.0)) / 2.0).epsilon(1e-14));
    CHECK(value == Catch::Approx(0.2264666).margin(1e-6));

    SECTION("swap invariance at the midpoint") {
        const double before = conformal_density(0, 1.0, d, w, 1.0);
        const Dataset swapped = single_unit(2.0, 0.0);
        CHECK(conformal_density(0, 1.0, swapped, w, 1.0) == before);  // bitwise
    }
    SECTION("coincident mass gives the kernel peak") {
        const Dataset coincident = single_unit(0.7, 0.7);
        const double h = 0.3;
        CHECK(conformal_density(0, 0.7, coincident, w, h) ==
              Catch::Approx(1.0 / (h * std::sqrt(2.0 * M_PI))).epsilon(1e-14));
    }
    SECTION("bad inputs") {
        CHECK_THROWS_AS(conformal_density(0, 0.0, d, w, 0.0), Error);
    }
}

TEST_CASE("conformal density integrates to one", "[estimators]") {
    Rng rng(31);
    Dataset d;
    for (int i = 0; i < 25; ++i) {
        d.units.push_back({rng.next_normal(), Covariate::real1(rng.next_normal()),
                           rng.next_normal(0.5, 1.2)});
    }
    const WeightMatrix w = kernel_weights(covariates_of(d), 1.0);
    const double h = 0.4;
    double lo = d.units[0].t;
    double hi = lo;
    for (const TestUnit& u : d.units) {
        lo = std::min({lo, u.t, u.t_cal});
        hi = std::max({hi, u.t, u.t_cal});
    }
    lo -= 8.0 * h;
    hi += 8.0 * h;
    const int n_grid = 4000;
    const double dx = (hi - lo) / n_grid;
    for (std::size_t i : {std::size_t{0}, std::size_t{7}}) {
        double integral = 0.0;
        for (int k = 0; k <= n_grid; ++k) {
            const double weight = (k == 0 || k == n_grid) ? 0.5 : 1.0;
            integral += weight * conformal_density(i, lo + k * dx, d, w, h);
        }
        integral *= dx;
        CHECK(integral == Catch::Approx(1.0).margin(1e-3));
    }
}

TEST_CASE("single-group conformal density reduces to the pooled KDE", "[estimators]") {
    Rng rng(67);
    Dataset d;
    for (int i = 0; i < 12; ++i) {
        d.units.push_back({rng.next_normal(), Covariate::category("only"), rng.next_normal()});
    }
    const WeightMatrix w = group_weights(covariates_of(d));
    const double h = 0.5;
    for (double t : {-1.3, 0.0, 0.9}) {
        // Brute-force pooled KDE over all 2m points.
        double pooled = 0.0;
        for (const TestUnit& u : d.units) {
            pooled += gauss_density((t - u.t) / h) / h;
            pooled += gauss_density((t - u.t_cal) / h) / h;
        }
        pooled /= 2.0 * d.size();
        CHECK(conformal_density(0, t, d, w, h) == Catch::Approx(pooled).epsilon(1e-12));
    }
}

TEST_CASE("conformal proportion matches the indicator-count oracle", "[estimators]") {
    const std::vector<Covariate> s = {Covariate::category("g"), Covariate::category("g")};
    const WeightMatrix w = group_weights(s);
    const std::vector<double> p_test = {0.01, 0.8};
    const std::vector<double> p_cal = {0.6, 0.9};
    // counts = I{0.01>.5}+I{0.6>.5} + I{0.8>.5}+I{0.9>.5} = 3
    CHECK(conformal_proportion(0, p_test, p_cal, w, 0.5) == Catch::Approx(-0.5).epsilon(1e-14));

    SECTION("all p-values below lambda") {
        const std::vector<double> small = {0.1, 0.2};
        CHECK(conformal_proportion(0, small, small, w, 0.5) == 1.0);
    }
    SECTION("swapping test and calibration p-values changes nothing") {
        const double swapped = conformal_proportion(0, p_cal, p_test, w, 0.5);
        CHECK(swapped == conformal_proportion(0, p_test, p_cal, w, 0.5));  // bitwise
    }
}

TEST_CASE("proportion clamp follows the three branches", "[estimators]") {
    CHECK(clamp_proportion(-0.5, 0.001) == 0.001);
    CHECK(clamp_proportion(0.7, 0.001) == Catch::Approx(0.499).epsilon(1e-14));
    CHECK(clamp_proportion(0.3, 0.001) == 0.3);
    CHECK(clamp_proportion(0.0, 0.001) == 0.001);   // raw <= 0 branch
    CHECK(clamp_proportion(0.5, 0.001) == 0.5);     // exactly 1/2 stays interior
}

TEST_CASE("clfdr score clamps the likelihood ratio", "[estimators]") {
    CHECK(clfdr_score(0.2, 0.25, 0.4, 0.999, 1e-12) == Catch::Approx(0.375).epsilon(1e-14));
    CHECK(clfdr_score(0.2, 0.25, 0.0, 0.999, 1e-12) == 0.999);  // floored ratio, clamped
    CHECK(clfdr_score(0.0, 0.25, 0.4, 0.999, 1e-12) == 0.0);
}

TEST_CASE("r transform maps the worked examples and preserves ranking", "[estimators]") {
    CHECK(r_transform(0.5, 0.25) == Catch::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r_transform(0.0, 0.1) == 0.0);
    CHECK(r_transform(0.0, 0.4) == 0.0);
    CHECK(r_transform(0.7, 0.5) == 0.0);  // pi_tilde = 1/2 zeroes the leading factor

    // For fixed pi_tilde, ordering over a grid matches the clfdr ordering.
    const double pi = 0.2;
    std::vector<double> clfdrs;
    for (int k = 0; k < 50; ++k) clfdrs.push_back(0.999 * k / 49.0);
    for (std::size_t a = 0; a + 1 < clfdrs.size(); ++a) {
        CHECK(r_transform(clfdrs[a], pi) < r_transform(clfdrs[a + 1], pi));
    }
}

TEST_CASE("p-values from a null CDF respect sidedness", "[estimators]") {
    const NullModel f0 = standard_normal_null();
    CHECK(pvalue_from_null(0.0, f0.cdf, Sidedness::two_sided) == 1.0);
    CHECK(pvalue_from_null(1.959964, f0.cdf, Sidedness::two_sided) ==
          Catch::Approx(0.05).margin(1e-6));
    CHECK(pvalue_from_null(1e10, f0.cdf, Sidedness::right) == 0.0);
    CHECK(pvalue_from_null(-0.5, f0.cdf, Sidedness::left) ==
          Catch::Approx(normal_cdf(-0.5)).epsilon(1e-14));
    CHECK(pvalue_from_null(-0.5, f0.cdf, Sidedness::right) ==
          Catch::Approx(1.0 - normal_cdf(-0.5)).epsilon(1e-14));
}
