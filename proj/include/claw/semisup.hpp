#pragma once
// Semi-supervised path for an unknown null distribution: null-pool splitting,
// conformal p-values from a training split, kernel density-ratio scores for
// grouped covariates, and the augmentation strategy for real covariates.
//
// Every estimator here depends on the test/calibration statistics only
// through unordered pooled multisets (centers are sorted canonically before
// any accumulation), so subset swaps of (T_i, T_cal_i) are bit-exact no-ops.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "claw/error.hpp"
#include "claw/estimators.hpp"
#include "claw/pipeline.hpp"
#include "claw/rng.hpp"
#include "claw/types.hpp"
#include "claw/weights.hpp"

namespace claw {

struct NullSplit {
    std::vector<double> calibration;          // paired one-to-one with test units
    std::vector<double> train1;               // ranks the conformal p-values
    std::vector<double> train2;               // trains the conformity score
    std::vector<std::size_t> calibration_indices;  // audit manifest into the pool
};

// Seeded uniform draw of m calibration points without replacement; the
// remainder is split into the two training halves by `train_fraction_tr1`.
inline NullSplit split_nulls(const std::vector<double>& null_pool, std::size_t m,
                             std::uint64_t seed, double train_fraction_tr1 = 0.5) {
    require(m >= 1, ErrorCode::EmptyDataset, "need at least one test unit");
    require(train_fraction_tr1 > 0.0 && train_fraction_tr1 < 1.0, ErrorCode::InvalidConfig,
            "train fraction must be in (0,1)");
    const std::size_t n = null_pool.size();
    if (n < m + 2) {
        raise(ErrorCode::InsufficientNulls,
              "null pool needs at least m + 2 entries, got " + std::to_string(n));
    }
    Rng rng = stream_rng(seed, 0, 0x5EEDull);
    const std::vector<std::size_t> perm = rng.sample_without_replacement(n, m);

    NullSplit split;
    split.calibration.reserve(m);
    split.calibration_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    for (std::size_t k = 0; k < m; ++k) split.calibration.push_back(null_pool[perm[k]]);

    std::vector<std::size_t> rest(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());
    std::sort(rest.begin(), rest.end());
    std::size_t n_tr1 =
        static_cast<std::size_t>(train_fraction_tr1 * static_cast<double>(rest.size()));
    n_tr1 = std::min(std::max<std::size_t>(n_tr1, 1), rest.size() - 1);
    for (std::size_t k = 0; k < rest.size(); ++k) {
        (k < n_tr1 ? split.train1 : split.train2).push_back(null_pool[rest[k]]);
    }
    return split;
}

namespace detail {

// Plain pooled kernel density with canonically sorted centers.
struct Kde {
    std::vector<double> centers;  // sorted
    double inv_h = 0.0;
    double norm = 0.0;

    static Kde fit(std::vector<double> centers, const BandwidthRule& rule) {
        require(!centers.empty(), ErrorCode::EmptyInput, "KDE needs centers");
        std::sort(centers.begin(), centers.end());
        const double h = rule.kind == BandwidthRule::Kind::fixed
                             ? rule.h
                             : silverman_bandwidth(centers);
        require(h > 0.0, ErrorCode::InvalidConfig, "bandwidth must be positive");
        Kde kde;
        kde.centers = std::move(centers);
        kde.inv_h = 1.0 / h;
        kde.norm = kInvSqrt2Pi / h;
        return kde;
    }

    double operator()(double x) const {
        double acc = 0.0;
        for (double c : centers) acc += gauss_kernel(x - c, inv_h, norm);
        return acc / static_cast<double>(centers.size());
    }

    double bandwidth() const { return 1.0 / inv_h; }
};

}  // namespace detail

using ScoreFn = std::function<double(double)>;

// Default conformity score for the semi-supervised p-values: the ratio of the
// train2 density to the pooled (test + calibration + train1) density. The
// pooled multiset makes the score invariant to any permutation of those
// inputs, which is the class the conformal p-values require.
struct PuKernelScore {
    detail::Kde numerator;
    detail::Kde pooled;
    double floor = 1e-12;

    double operator()(double x) const { return numerator(x) / std::max(pooled(x), floor); }
};

inline PuKernelScore pu_kernel_score(std::span<const double> test,
                                     std::span<const double> calibration,
                                     std::span<const double> train1,
                                     std::span<const double> train2,
                                     const BandwidthRule& rule = BandwidthRule::silverman(),
                                     double floor = 1e-12) {
    require(!train1.empty() && !train2.empty(), ErrorCode::EmptyTrainingHalf,
            "both training halves must be non-empty");
    std::vector<double> pooled;
    pooled.reserve(test.size() + calibration.size() + train1.size());
    pooled.insert(pooled.end(), test.begin(), test.end());
    pooled.insert(pooled.end(), calibration.begin(), calibration.end());
    pooled.insert(pooled.end(), train1.begin(), train1.end());
    PuKernelScore score;
    score.numerator = detail::Kde::fit({train2.begin(), train2.end()}, rule);
    score.pooled = detail::Kde::fit(std::move(pooled), rule);
    score.floor = floor;
    return score;
}

struct ConformalPvaluePair {
    std::vector<double> test;
    std::vector<double> cal;
};

// p(x) = (1 + #{k in train1 : s(T0_k) <= s(x)}) / (1 + |train1|), evaluated
// for every test and calibration statistic. All outputs lie in (0, 1].
inline ConformalPvaluePair semisup_conformal_pvalues(std::span<const double> test,
                                                     std::span<const double> calibration,
                                                     const NullSplit& split,
                                                     const ScoreFn& score) {
    require(test.size() == calibration.size(), ErrorCode::LengthMismatch,
            "test and calibration lengths differ");
    require(!split.train1.empty(), ErrorCode::EmptyTrainingHalf, "train1 is empty");
    std::vector<double> train_scores(split.train1.size());
    for (std::size_t k = 0; k < split.train1.size(); ++k) {
        train_scores[k] = score(split.train1[k]);
    }
    std::sort(train_scores.begin(), train_scores.end());
    const double denom = 1.0 + static_cast<double>(train_scores.size());
    auto pvalue = [&](double x) {
        const double s = score(x);
        const auto count =
            std::upper_bound(train_scores.begin(), train_scores.end(), s) - train_scores.begin();
        return (1.0 + static_cast<double>(count)) / denom;
    };
    ConformalPvaluePair out;
    out.test.resize(test.size());
    out.cal.resize(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        out.test[i] = pvalue(test[i]);
        out.cal[i] = pvalue(calibration[i]);
    }
    return out;
}

// Same screening formula as conformal_proportion, fed conformal p-values,
// then clamped into [eps, 1/2].
inline double semisup_proportion(std::size_t i, std::span<const double> p_test,
                                 std::span<const double> p_cal, const WeightMatrix& weights,
                                 double lambda, double epsilon) {
    return clamp_proportion(conformal_proportion(i, p_test, p_cal, weights, lambda), epsilon);
}

// Grouped density-ratio evaluator r(t, k) = f_train(t) / max(f_k(t), floor),
// where f_k pools the test and calibration statistics of group k.
class GroupDensityRatio {
public:
    GroupDensityRatio(std::vector<std::string> labels, std::vector<detail::Kde> group_kdes,
                      detail::Kde train_kde, double floor)
        : labels_(std::move(labels)),
          group_kdes_(std::move(group_kdes)),
          train_kde_(std::move(train_kde)),
          floor_(floor) {}

    double operator()(double t, std::int32_t group_id) const {
        require(group_id >= 0 && static_cast<std::size_t>(group_id) < group_kdes_.size(),
                ErrorCode::IndexOutOfRange, "unknown group id");
        return train_kde_(t) /
               std::max(group_kdes_[static_cast<std::size_t>(group_id)](t), floor_);
    }

    std::int32_t group_id(const std::string& label) const {
        for (std::size_t g = 0; g < labels_.size(); ++g) {
            if (labels_[g] == label) return static_cast<std::int32_t>(g);
        }
        raise(ErrorCode::EmptyGroup, "label not present in the test set: " + label);
    }

    std::size_t n_groups() const { return labels_.size(); }

private:
    std::vector<std::string> labels_;
    std::vector<detail::Kde> group_kdes_;
    detail::Kde train_kde_;
    double floor_;
};

inline GroupDensityRatio group_density_ratio(std::span<const double> test,
                                             std::span<const double> calibration,
                                             std::span<const double> train,
                                             const std::vector<std::string>& labels,
                                             const BandwidthRule& rule = BandwidthRule::silverman(),
                                             double floor = 1e-12) {
    require(test.size() == calibration.size() && test.size() == labels.size(),
            ErrorCode::LengthMismatch, "test, calibration and labels must agree in length");
    require(!train.empty(), ErrorCode::EmptyTraining, "training nulls are empty");
    std::vector<std::string> group_labels;
    std::vector<std::vector<double>> pooled;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        std::size_t g = 0;
        for (; g < group_labels.size(); ++g) {
            if (group_labels[g] == labels[i]) break;
        }
        if (g == group_labels.size()) {
            group_labels.push_back(labels[i]);
            pooled.emplace_back();
        }
        pooled[g].push_back(test[i]);
        pooled[g].push_back(calibration[i]);
    }
    std::vector<detail::Kde> group_kdes;
    group_kdes.reserve(pooled.size());
    for (std::size_t g = 0; g < pooled.size(); ++g) {
        require(!pooled[g].empty(), ErrorCode::EmptyGroup, "group has no test units");
        group_kdes.push_back(detail::Kde::fit(std::move(pooled[g]), rule));
    }
    detail::Kde train_kde = detail::Kde::fit({train.begin(), train.end()}, rule);
    return GroupDensityRatio(std::move(group_labels), std::move(group_kdes),
                             std::move(train_kde), floor);
}

// Product-kernel density ratio over covariate-augmented points for real
// covariates. Training statistics are paired with the observed covariates
// (seeded; without replacement when the pool is large enough). Both KDEs use
// the per-coordinate Silverman bandwidths of the pooled 2m augmented points;
// a degenerate covariate coordinate falls back to unit bandwidth, which
// cancels in the ratio.
class AugmentedDensityRatio {
public:
    AugmentedDensityRatio(std::vector<std::vector<double>> numerator_points,
                          std::vector<std::vector<double>> denominator_points,
                          std::vector<double> bandwidths, double floor)
        : numerator_(std::move(numerator_points)),
          denominator_(std::move(denominator_points)),
          inv_h_(bandwidths.size()),
          floor_(floor) {
        double log_norm = 0.0;
        for (std::size_t c = 0; c < bandwidths.size(); ++c) {
            inv_h_[c] = 1.0 / bandwidths[c];
            log_norm += std::log(kInvSqrt2Pi * inv_h_[c]);
        }
        norm_ = std::exp(log_norm);
    }

    double operator()(double t, std::span<const double> s) const {
        require(s.size() + 1 == inv_h_.size(), ErrorCode::DimensionMismatch,
                "covariate dimension differs from the fitted ratio");
        const double num = eval(numerator_, t, s);
        const double den = eval(denominator_, t, s);
        return num / std::max(den, floor_);
    }

private:
    double eval(const std::vector<std::vector<double>>& points, double t,
                std::span<const double> s) const {
        double acc = 0.0;
        for (const std::vector<double>& p : points) {
            double z = (t - p[0]) * inv_h_[0];
            double expo = z * z;
            for (std::size_t c = 0; c < s.size(); ++c) {
                const double d = (s[c] - p[c + 1]) * inv_h_[c + 1];
                expo += d * d;
            }
            acc += std::exp(-0.5 * expo);
        }
        return acc * norm_ / static_cast<double>(points.size());
    }

    std::vector<std::vector<double>> numerator_;    // sorted (t, s...) training points
    std::vector<std::vector<double>> denominator_;  // sorted pooled test/calibration points
    std::vector<double> inv_h_;
    double norm_ = 1.0;
    double floor_;
};

inline AugmentedDensityRatio augment_density_ratio(std::span<const double> test,
                                                   std::span<const double> calibration,
                                                   const std::vector<Covariate>& covariates,
                                                   std::span<const double> train,
                                                   std::uint64_t seed, double floor = 1e-12) {
    const std::size_t m = test.size();
    require(calibration.size() == m && covariates.size() == m, ErrorCode::LengthMismatch,
            "test, calibration and covariates must agree in length");
    require(!train.empty(), ErrorCode::EmptyTraining, "training nulls are empty");
    const std::size_t dim = covariates.front().dim();
    for (const Covariate& s : covariates) {
        require(s.is_real() && s.dim() == dim && dim >= 1, ErrorCode::MixedCovariateKinds,
                "augmentation needs real covariates of one dimension");
    }

    auto augmented = [&](double t, std::size_t i) {
        std::vector<double> point(dim + 1);
        point[0] = t;
        for (std::size_t c = 0; c < dim; ++c) point[c + 1] = covariates[i].coords()[c];
        return point;
    };

    std::vector<std::vector<double>> denominator;
    denominator.reserve(2 * m);
    for (std::size_t i = 0; i < m; ++i) denominator.push_back(augmented(test[i], i));
    for (std::size_t i = 0; i < m; ++i) denominator.push_back(augmented(calibration[i], i));

    // Per-coordinate Silverman bandwidths on the pooled 2m augmented points.
    std::vector<double> bandwidths(dim + 1);
    for (std::size_t c = 0; c <= dim; ++c) {
        std::vector<double> coord(denominator.size());
        for (std::size_t k = 0; k < denominator.size(); ++k) coord[k] = denominator[k][c];
        try {
            bandwidths[c] = silverman_bandwidth(std::move(coord));
        } catch (const Error& err) {
            if (err.code() != ErrorCode::DegenerateSample || c == 0) throw;
            bandwidths[c] = 1.0;  // collapsed covariate coordinate
        }
    }
    std::sort(denominator.begin(), denominator.end());

    Rng rng = stream_rng(seed, 0, 0xA0Cull);
    std::vector<std::vector<double>> numerator;
    numerator.reserve(m);
    if (train.size() >= m) {
        const std::vector<std::size_t> pick =
            rng.sample_without_replacement(train.size(), m);
        for (std::size_t i = 0; i < m; ++i) numerator.push_back(augmented(train[pick[i]], i));
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            numerator.push_back(augmented(train[rng.next_below(train.size())], i));
        }
    }
    std::sort(numerator.begin(), numerator.end());

    return AugmentedDensityRatio(std::move(numerator), std::move(denominator),
                                 std::move(bandwidths), floor);
}

// Semi-supervised CLAW: split the pool, build conformal p-values, estimate
// the proportion and the density ratio, transform, and run the mirror.
inline ClawRun semisup_claw_run(const Dataset& data, const ClawConfig& config,
                                std::shared_ptr<const WeightMatrix> weights = nullptr,
                                NullSplit* split_out = nullptr) {
    validate_dataset(data, config);
    require(data.null_pool.has_value(), ErrorCode::InsufficientNulls,
            "semi-supervised run needs a null pool");
    const std::size_t m = data.units.size();
    if (!weights) weights = build_weights(data, config);
    require(weights->size() == m, ErrorCode::LengthMismatch,
            "weight matrix size differs from m");

    std::vector<double> test(m);
    std::vector<double> calibration(m);
    NullSplit split = split_nulls(*data.null_pool, m, config.seed, config.train_fraction);
    for (std::size_t i = 0; i < m; ++i) {
        test[i] = data.units[i].t;
        calibration[i] = split.calibration[i];
    }

    const PuKernelScore score = pu_kernel_score(test, calibration, split.train1, split.train2,
                                                config.bandwidth, config.density_floor);
    const ConformalPvaluePair pvals =
        semisup_conformal_pvalues(test, calibration, split, std::cref(score));

    std::vector<double> train_all;
    train_all.reserve(split.train1.size() + split.train2.size());
    train_all.insert(train_all.end(), split.train1.begin(), split.train1.end());
    train_all.insert(train_all.end(), split.train2.begin(), split.train2.end());

    // The dataset's paired calibration statistics come from the split.
    Dataset paired = data;
    for (std::size_t i = 0; i < m; ++i) paired.units[i].t_cal = calibration[i];

    detail::ScoreVectors scores;
    const bool categorical = data.units.front().s.is_categorical();
    if (categorical) {
        std::vector<std::string> labels(m);
        for (std::size_t i = 0; i < m; ++i) labels[i] = data.units[i].s.label();
        const GroupDensityRatio ratio = group_density_ratio(
            test, calibration, train_all, labels, config.bandwidth, config.density_floor);
        std::vector<std::int32_t> unit_group(m);
        for (std::size_t i = 0; i < m; ++i) unit_group[i] = ratio.group_id(labels[i]);
        auto clfdr_at = [&](double t, double /*f_hat*/, double pi_tilde, std::size_t i) {
            return std::min((1.0 - pi_tilde) * ratio(t, unit_group[i]), config.clfdr_cap);
        };
        scores = detail::conformal_scores<false>(paired, *weights, pvals.test, pvals.cal,
                                                 score.pooled.bandwidth(), config, clfdr_at);
    } else {
        const AugmentedDensityRatio ratio =
            augment_density_ratio(test, calibration, covariates_of(data), train_all,
                                  mix_seed(config.seed, 0xA06Dull), config.density_floor);
        auto clfdr_at = [&](double t, double /*f_hat*/, double pi_tilde, std::size_t i) {
            return std::min((1.0 - pi_tilde) * ratio(t, data.units[i].s.coords()),
                            config.clfdr_cap);
        };
        scores = detail::conformal_scores<false>(paired, *weights, pvals.test, pvals.cal,
                                                 score.pooled.bandwidth(), config, clfdr_at);
    }

    if (split_out) *split_out = std::move(split);

    ClawRun run;
    run.config = config;
    run.weight_matrix = std::move(weights);
    run.estimator_state = std::move(scores.state);
    run.decision = detail::decide(std::move(scores.u), std::move(scores.u_tilde), config.alpha);
    return run;
}

}  // namespace claw
