#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "claw/baselines.hpp"
#include "claw/rng.hpp"

using namespace claw;

namespace {

std::set<std::size_t> as_set(const IndexSet& idx) { return {idx.begin(), idx.end()}; }

}  // namespace

TEST_CASE("BH worked examples", "[baselines]") {
    CHECK(as_set(bh(std::vector<double>{0.01, 0.02, 0.5}, 0.05)) == std::set<std::size_t>{0, 1});
    CHECK(bh(std::vector<double>{1.0, 1.0, 1.0}, 0.05).empty());
    CHECK(as_set(bh(std::vector<double>{0.0, 0.0}, 0.05)) == std::set<std::size_t>{0, 1});
    CHECK_THROWS_AS(bh(std::vector<double>{0.5}, 0.0), Error);
    CHECK_THROWS_AS(bh(std::vector<double>{1.5}, 0.05), Error);
}

TEST_CASE("Storey estimator worked examples", "[baselines]") {
    // m = 4, lambda = 0.5, three p-values above: raw = 1 - 3/2 = -0.5 -> 0.
    CHECK(storey_pi(std::vector<double>{0.1, 0.6, 0.7, 0.9}, 0.5) == 0.0);
    // Everything above lambda: raw negative -> 0.
    CHECK(storey_pi(std::vector<double>{0.6, 0.7, 0.8, 0.9}, 0.5) == 0.0);
    // Nothing above lambda: raw = 1 -> ceiling 1 - 1/m.
    CHECK(storey_pi(std::vector<double>{0.1, 0.2, 0.3, 0.4}, 0.5) == Catch::Approx(0.75));
}

TEST_CASE("Storey-BH adjusts the level and contains BH", "[baselines]") {
    SECTION("pi_hat = 0 leaves BH unchanged") {
        const std::vector<double> p = {0.01, 0.6, 0.7, 0.9};
        CHECK(as_set(storey_bh(p, 0.05, 0.5)) == as_set(bh(p, 0.05)));
    }
    SECTION("containment on sparse-signal replications") {
        Rng rng(99);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> p(60);
            for (double& v : p) {
                v = rng.next_bernoulli(0.15) ? rng.next_unit() * 0.01 : rng.next_unit();
            }
            const IndexSet base = bh(p, 0.05);
            const IndexSet adjusted = storey_bh(p, 0.05, 0.5);
            CHECK(std::includes(adjusted.begin(), adjusted.end(), base.begin(), base.end()));
        }
    }
}

TEST_CASE("conformal p-values are standardized ranks", "[baselines]") {
    const std::vector<double> cal = {0.1, 0.5, 0.9};
    CHECK(conformal_pvalues(std::vector<double>{0.3}, cal)[0] == Catch::Approx(0.5));
    CHECK(conformal_pvalues(std::vector<double>{0.05}, cal)[0] == Catch::Approx(0.25));
    CHECK(conformal_pvalues(std::vector<double>{0.95}, cal)[0] == 1.0);
    CHECK_THROWS_AS(conformal_pvalues(std::vector<double>{0.3}, std::vector<double>{}), Error);
}

TEST_CASE("counting threshold worked example", "[baselines]") {
    const std::vector<double> test = {0.05, 0.5};
    const std::vector<double> cal = {0.3, 0.6, 0.9, 0.95};
    const CbhResult r = cbh_threshold(test, cal, 0.5);
    CHECK(r.threshold == 0.5);
    CHECK(as_set(r.rejected) == std::set<std::size_t>{0, 1});

    SECTION("alpha below the minimum estimate rejects nothing") {
        const CbhResult none = cbh_threshold(test, cal, 0.01);
        CHECK(none.threshold == kNoThreshold);
        CHECK(none.rejected.empty());
    }
}

TEST_CASE("counting form equals BH on conformal p-values", "[baselines][property]") {
    Rng rng(1234);
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t m = 1 + rng.next_below(40);
        const std::size_t n_cal = 1 + rng.next_below(60);
        std::vector<double> test(m);
        std::vector<double> cal(n_cal);
        for (double& v : test) v = rng.next_normal();
        for (double& v : cal) v = rng.next_normal(0.2, 1.1);
        const double alpha = 0.02 + 0.6 * rng.next_unit();
        const IndexSet via_counting = cbh_threshold(test, cal, alpha).rejected;
        const IndexSet via_bh = bh(conformal_pvalues(test, cal), alpha);
        CHECK(as_set(via_counting) == as_set(via_bh));
    }
}

TEST_CASE("BH on conformal p-values ignores monotone score transforms",
          "[baselines][property]") {
    Rng rng(321);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> test(25);
        std::vector<double> cal(40);
        for (double& v : test) v = rng.next_normal();
        for (double& v : cal) v = rng.next_normal();
        auto transform = [](double x) { return x * x * x + 2.0 * x; };  // strictly increasing
        std::vector<double> test_tr(test.size());
        std::vector<double> cal_tr(cal.size());
        std::transform(test.begin(), test.end(), test_tr.begin(), transform);
        std::transform(cal.begin(), cal.end(), cal_tr.begin(), transform);
        CHECK(conformal_pvalues(test, cal) == conformal_pvalues(test_tr, cal_tr));
        CHECK(as_set(bh(conformal_pvalues(test, cal), 0.2)) ==
              as_set(bh(conformal_pvalues(test_tr, cal_tr), 0.2)));
    }
}

TEST_CASE("conformal p-values are super-uniform under exchangeable nulls",
          "[baselines][property]") {
    Rng rng(888);
    const std::vector<double> grid = {0.05, 0.1, 0.2, 0.5};
    std::vector<double> hits(grid.size(), 0.0);
    std::vector<double> hits_sq(grid.size(), 0.0);
    const int n_reps = 400;
    for (int rep = 0; rep < n_reps; ++rep) {
        std::vector<double> test(30);
        std::vector<double> cal(30);
        for (double& v : test) v = rng.next_normal();
        for (double& v : cal) v = rng.next_normal();
        const std::vector<double> p = conformal_pvalues(test, cal);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            double frac = 0.0;
            for (double v : p) frac += v <= grid[g] ? 1.0 : 0.0;
            frac /= static_cast<double>(p.size());
            hits[g] += frac;
            hits_sq[g] += frac * frac;
        }
    }
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double mean = hits[g] / n_reps;
        const double var = hits_sq[g] / n_reps - mean * mean;
        const double se = std::sqrt(std::max(var, 0.0) / n_reps);
        CHECK(mean <= grid[g] + 3.0 * se);
    }
}

TEST_CASE("separate drivers union per-group rejections", "[baselines]") {
    const std::vector<std::string> labels = {"a", "a", "b", "b"};
    const std::vector<double> p = {0.001, 0.9, 0.002, 0.8};
    const IndexSet r = separate_bh(p, labels, 0.05);
    CHECK(as_set(r) == std::set<std::size_t>{0, 2});

    // With 2 calibration points per group the smallest attainable estimate is
    // (1/3)/(1/2) = 2/3, so the level must sit above it.
    const std::vector<double> test = {0.01, 0.9, 0.02, 0.95};
    const std::vector<double> cal = {0.5, 0.6, 0.55, 0.55};
    const IndexSet rc = separate_cbh(test, cal, labels, 0.7);
    CHECK(as_set(rc) == std::set<std::size_t>{0, 2});
}
