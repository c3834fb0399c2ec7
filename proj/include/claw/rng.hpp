#pragma once
// Counter-based splittable RNG. Streams are keyed by (master seed, replication,
// stream tag) so draws are reproducible regardless of worker scheduling.
// Normal deviates go through the inverse CDF for cross-platform bit stability.

#include <cstdint>
#include <vector>

#include "claw/distributions.hpp"

namespace claw {

namespace detail {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// seed_r = mix(master_seed, r): the per-replication key derivation.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t counter) {
    return detail::mix64(detail::mix64(seed ^ 0xD1B54A32D192ED03ull) ^
                         (counter * 0xA24BAED4963EE407ull + 0x8CB92BA72F3D8DD7ull));
}

class Rng {
public:
    explicit Rng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1); safe as a quantile-function input.
    double next_unit() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() { return normal_quantile(next_unit()); }

    double next_normal(double mean, double sd) { return mean + sd * next_normal(); }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Unbiased integer in [0, n) by rejection.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * (UINT64_MAX / n);
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // Seeded partial Fisher-Yates: the first `take` entries of the returned
    // permutation of [0, n) are a uniform sample without replacement.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t take) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i + 1 < n && i < take; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(next_below(n - i));
            std::swap(idx[i], idx[j]);
        }
        return idx;
    }

private:
    std::uint64_t state_;
};

inline Rng stream_rng(std::uint64_t master, std::uint64_t replication, std::uint64_t stream) {
    return Rng(mix_seed(mix_seed(master, replication), stream ^ 0x6A09E667F3BCC909ull));
}

}  // namespace claw
