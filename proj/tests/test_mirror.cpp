#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "claw/mirror.hpp"
#include "claw/rng.hpp"

using namespace claw;

namespace {

// O(m^2) reference: evaluates Q(t) by direct counting at every candidate in
// {nu_i} and keeps the largest admissible one. Tied pairs are excluded from
// both counts, matching the implementation contract.
double brute_threshold(const std::vector<double>& u, const std::vector<double>& ut,
                       double alpha) {
    double best = kNoThreshold;
    for (std::size_t c = 0; c < u.size(); ++c) {
        const double t = std::min(u[c], ut[c]);
        std::size_t mirror_count = 0;
        std::size_t reject_count = 0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (ut[j] < u[j] && ut[j] <= t) ++mirror_count;
            if (u[j] < ut[j] && u[j] <= t) ++reject_count;
        }
        const double q = (1.0 + mirror_count) / std::max<std::size_t>(1, reject_count);
        if (q <= alpha && t > best) best = t;
    }
    return best;
}

// Same counting, scanning every score in U and U~ instead of just {nu_i}.
double brute_threshold_full_scan(const std::vector<double>& u, const std::vector<double>& ut,
                                 double alpha) {
    std::vector<double> candidates(u.begin(), u.end());
    candidates.insert(candidates.end(), ut.begin(), ut.end());
    double best = kNoThreshold;
    for (double t : candidates) {
        std::size_t mirror_count = 0;
        std::size_t reject_count = 0;
        for (std::size_t j = 0; j < u.size(); ++j) {
            if (ut[j] < u[j] && ut[j] <= t) ++mirror_count;
            if (u[j] < ut[j] && u[j] <= t) ++reject_count;
        }
        const double q = (1.0 + mirror_count) / std::max<std::size_t>(1, reject_count);
        if (q <= alpha && t > best) best = t;
    }
    return best;
}

std::set<std::size_t> as_set(const IndexSet& idx) { return {idx.begin(), idx.end()}; }

struct RandomScores {
    std::vector<double> u;
    std::vector<double> ut;
};

RandomScores random_scores(Rng& rng, std::size_t m, double signal_fraction) {
    RandomScores s;
    s.u.resize(m);
    s.ut.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        s.ut[i] = rng.next_unit();
        s.u[i] = rng.next_bernoulli(signal_fraction) ? rng.next_unit() * 0.2 : rng.next_unit();
    }
    return s;
}

}  // namespace

TEST_CASE("mirror threshold agrees with the brute-force oracle on the worked case",
          "[mirror]") {
    const std::vector<double> u = {0.1, 0.15, 0.9};
    const std::vector<double> ut = {0.8, 0.7, 0.95};
    // Oracle: candidates nu = (0.1, 0.15, 0.9); Q = 1, 1/2, 1/3 -> largest
    // admissible candidate is 0.9. Scanning all of U and U~ finds 0.95 with the
    // same counts; the rejection set and e-values are identical either way.
    CHECK(brute_threshold(u, ut, 0.5) == 0.9);
    const double tau = mirror_threshold(u, ut, 0.5);
    CHECK(tau == 0.9);
    CHECK(brute_threshold_full_scan(u, ut, 0.5) == 0.95);
    CHECK(as_set(reject_set(u, ut, tau)) == as_set(reject_set(u, ut, 0.95)));

    SECTION("rejections and e-values on the worked case") {
        CHECK(as_set(reject_set(u, ut, tau)) == std::set<std::size_t>{0, 1, 2});
        const std::vector<double> e = evalues(u, ut, tau);
        CHECK(e == std::vector<double>{3.0, 3.0, 3.0});
    }
}

TEST_CASE("mirror threshold edge cases", "[mirror]") {
    SECTION("denominator never positive -> no threshold") {
        const std::vector<double> u = {0.5};
        const std::vector<double> ut = {0.1};
        CHECK(mirror_threshold(u, ut, 0.1) == kNoThreshold);
        CHECK(reject_set(u, ut, kNoThreshold).empty());
        CHECK(evalues(u, ut, kNoThreshold) == std::vector<double>{0.0});
    }
    SECTION("m = 1 with alpha = 1 admits the single candidate") {
        const std::vector<double> u = {0.2};
        const std::vector<double> ut = {0.9};
        CHECK(mirror_threshold(u, ut, 1.0) == 0.2);
    }
    SECTION("all test scores above calibration -> empty rejections at any tau") {
        const std::vector<double> u = {0.9, 0.8};
        const std::vector<double> ut = {0.1, 0.2};
        CHECK(reject_set(u, ut, 5.0).empty());
    }
    SECTION("length mismatch") {
        CHECK_THROWS_AS(mirror_threshold(std::vector<double>{1.0}, std::vector<double>{}, 0.5),
                        Error);
    }
    SECTION("NaN scores are rejected") {
        CHECK_THROWS_AS(
            mirror_threshold(std::vector<double>{std::nan("")}, std::vector<double>{0.1}, 0.5),
            Error);
    }
}

TEST_CASE("exact ties are excluded and never rejected", "[mirror]") {
    const std::vector<double> u = {0.1, 0.4, 0.4};
    const std::vector<double> ut = {0.8, 0.4, 0.9};
    const MirrorDiagnostics d = mirror_diagnostics(u, ut);
    CHECK(d.ties == IndexSet{1});
    const double tau = mirror_threshold(u, ut, 1.0);
    const IndexSet r = reject_set(u, ut, tau);
    CHECK(std::find(r.begin(), r.end(), 1) == r.end());
    CHECK(evalues(u, ut, tau)[1] == 0.0);
    // The tied pair contributes to neither count: unit 0 and 2 see Q = 1/2.
    CHECK(tau == brute_threshold(u, ut, 1.0));
}

TEST_CASE("e-values have the shared-denominator form", "[mirror]") {
    Rng rng(909);
    for (int rep = 0; rep < 50; ++rep) {
        const RandomScores s = random_scores(rng, 40, 0.3);
        const double tau = mirror_threshold(s.u, s.ut, 0.2);
        const std::vector<double> e = evalues(s.u, s.ut, tau);
        double nonzero = 0.0;
        for (double v : e) {
            if (v == 0.0) continue;
            if (nonzero == 0.0) nonzero = v;
            CHECK(v == nonzero);
        }
        if (nonzero > 0.0) {
            const double c = 40.0 / nonzero - 1.0;
            CHECK(c == Catch::Approx(std::round(c)).margin(1e-9));
        }
    }
}

TEST_CASE("one rejection with one mirror exceedance gives e = m/2", "[mirror]") {
    const std::vector<double> u = {0.1, 0.9};
    const std::vector<double> ut = {0.6, 0.05};
    const std::vector<double> e = evalues(u, ut, 0.1);
    CHECK(e[0] == 1.0);  // m/(1+1) = 2/2
    CHECK(e[1] == 0.0);
}

TEST_CASE("e-BH worked examples", "[mirror]") {
    CHECK(as_set(ebh(std::vector<double>{3.0, 3.0, 3.0}, 0.5)) == std::set<std::size_t>{0, 1, 2});
    CHECK(ebh(std::vector<double>{0.0, 0.0, 0.0}, 0.5).empty());
    CHECK(as_set(ebh(std::vector<double>{3.0, 1.0}, 2.0 / 3.0)) == std::set<std::size_t>{0});
    CHECK_THROWS_AS(ebh(std::vector<double>{-1.0}, 0.5), Error);
}

TEST_CASE("mirror diagnostics definitions", "[mirror]") {
    const std::vector<double> u = {0.1, 0.5};
    const std::vector<double> ut = {0.8, 0.2};
    const MirrorDiagnostics d = mirror_diagnostics(u, ut);
    CHECK(d.nu == std::vector<double>{0.1, 0.2});
    CHECK(d.eta == std::vector<std::uint8_t>{1, 0});
    CHECK(d.ties.empty());

    // Swapping a pair flips eta and keeps nu.
    const MirrorDiagnostics swapped = mirror_diagnostics(ut, u);
    CHECK(swapped.nu == d.nu);
    CHECK(swapped.eta == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("algorithm rejections equal e-BH on the derived e-values", "[mirror][property]") {
    Rng rng(2024);
    int checked = 0;
    for (std::size_t m : {1, 5, 50}) {
        for (double alpha : {0.05, 0.2, 0.5}) {
            for (int rep = 0; rep < 40; ++rep) {
                const RandomScores s = random_scores(rng, m, 0.4);
                const double tau = mirror_threshold(s.u, s.ut, alpha);
                const IndexSet direct = reject_set(s.u, s.ut, tau);
                const IndexSet via_ebh = ebh(evalues(s.u, s.ut, tau), alpha);
                CHECK(as_set(direct) == as_set(via_ebh));
                ++checked;
            }
        }
    }
    CHECK(checked == 360);
}

TEST_CASE("sweep matches brute force on random instances", "[mirror][property]") {
    Rng rng(515);
    for (int rep = 0; rep < 120; ++rep) {
        const std::size_t m = 1 + rng.next_below(60);
        RandomScores s = random_scores(rng, m, 0.3);
        if (rep % 5 == 0 && m >= 2) s.ut[0] = s.u[0];  // inject an exact tie
        for (double alpha : {0.05, 0.25, 0.6}) {
            const double fast = mirror_threshold(s.u, s.ut, alpha);
            const double brute = brute_threshold(s.u, s.ut, alpha);
            CHECK(fast == brute);
            // Scan-set equivalence: the full-scan threshold may sit higher on
            // the same step, but the induced decisions coincide.
            const double full = brute_threshold_full_scan(s.u, s.ut, alpha);
            CHECK(as_set(reject_set(s.u, s.ut, fast)) == as_set(reject_set(s.u, s.ut, full)));
        }
    }
}

TEST_CASE("threshold lies in the nu domain and grows with alpha", "[mirror][property]") {
    Rng rng(616);
    for (int rep = 0; rep < 60; ++rep) {
        const std::size_t m = 2 + rng.next_below(50);
        const RandomScores s = random_scores(rng, m, 0.35);
        IndexSet previous;
        for (double alpha : {0.02, 0.05, 0.1, 0.3, 0.7, 1.0}) {
            const double tau = mirror_threshold(s.u, s.ut, alpha);
            if (tau != kNoThreshold) {
                bool in_domain = false;
                for (std::size_t i = 0; i < m; ++i) {
                    if (tau == std::min(s.u[i], s.ut[i])) in_domain = true;
                }
                CHECK(in_domain);
            }
            const IndexSet r = reject_set(s.u, s.ut, tau);
            CHECK(std::includes(r.begin(), r.end(), previous.begin(), previous.end()));
            previous = r;

            // FDP bound at tau whenever something is rejected.
            if (!r.empty()) {
                std::size_t mirror_count = 0;
                for (std::size_t i = 0; i < m; ++i) {
                    if (s.ut[i] < s.u[i] && s.ut[i] <= tau) ++mirror_count;
                }
                CHECK((1.0 + mirror_count) / static_cast<double>(r.size()) <= alpha);
            }
        }
    }
}

TEST_CASE("null scores flip fair coins", "[mirror][property]") {
    // Exchangeable pairs under a full null: eta should be Bernoulli(1/2).
    Rng rng(7777);
    std::size_t heads = 0;
    std::size_t total = 0;
    for (int rep = 0; rep < 200; ++rep) {
        for (int i = 0; i < 50; ++i) {
            const double a = rng.next_normal();
            const double b = rng.next_normal();
            heads += a < b ? 1 : 0;
            ++total;
        }
    }
    const double z = (static_cast<double>(heads) - 0.5 * total) / std::sqrt(0.25 * total);
    CHECK(std::abs(z) < 2.5758);  // two-sided level 0.01
}
