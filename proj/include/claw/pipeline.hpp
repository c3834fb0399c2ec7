#pragma once
// End-to-end classical run with a known null distribution:
// weights -> p-values -> conformalized estimators -> ranking scores -> mirror.
//
// The per-unit score computation streams each weight row once (dense case) or
// pools within groups (group case); both orders reproduce the public per-unit
// estimator ops bit-for-bit, since skipped terms are exact zeros.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "claw/distributions.hpp"
#include "claw/error.hpp"
#include "claw/estimators.hpp"
#include "claw/mirror.hpp"
#include "claw/types.hpp"
#include "claw/weights.hpp"

namespace claw {

struct ClawRun {
    ClawConfig config;
    std::shared_ptr<const WeightMatrix> weight_matrix;
    EstimatorState estimator_state;
    DecisionResult decision;
};

inline std::shared_ptr<const WeightMatrix> build_weights(const Dataset& data,
                                                         const ClawConfig& config) {
    const std::vector<Covariate> covariates = covariates_of(data);
    const bool categorical = covariates.front().is_categorical();
    switch (config.weights.kind) {
        case WeightSpec::Kind::group:
            require(categorical, ErrorCode::InvalidConfig,
                    "group weights require categorical covariates");
            return std::make_shared<const WeightMatrix>(WeightMatrix::group(covariates));
        case WeightSpec::Kind::gaussian: {
            require(!categorical, ErrorCode::InvalidConfig,
                    "gaussian weights require real covariates");
            const DistanceNorm norm =
                covariates.front().dim() == 1 ? DistanceNorm::abs : DistanceNorm::euclidean;
            return std::make_shared<const WeightMatrix>(
                WeightMatrix::gaussian(covariates, config.weights.scale, norm));
        }
        case WeightSpec::Kind::custom:
            return std::make_shared<const WeightMatrix>(
                WeightMatrix::custom(covariates, config.weights.custom_fn));
    }
    raise(ErrorCode::InvalidConfig, "unknown weight spec");
}

namespace detail {

struct ScoreVectors {
    std::vector<double> u;
    std::vector<double> u_tilde;
    EstimatorState state;
};

// Evaluates the proportion and density estimates at both statistics of every
// unit, then the capped Clfdr score and the ranking transform. `clfdr_at`
// maps (t, f_hat, pi_tilde, unit) to the capped score, so the classical
// (known f0) and semi-supervised (density ratio) paths share this walk. The
// semi-supervised path scores through a density ratio instead of the kernel
// density, so it instantiates kNeedDensity = false and skips the kernel sums.
template <bool kNeedDensity = true, typename ClfdrAt>
inline ScoreVectors conformal_scores(const Dataset& data, const WeightMatrix& weights,
                                     std::span<const double> p_test,
                                     std::span<const double> p_cal, double bandwidth,
                                     const ClawConfig& config, const ClfdrAt& clfdr_at) {
    const std::size_t m = data.units.size();
    const double inv_h = 1.0 / bandwidth;
    const double norm = kInvSqrt2Pi * inv_h;

    ScoreVectors out;
    out.u.resize(m);
    out.u_tilde.resize(m);
    out.state.bandwidth = bandwidth;
    out.state.pi_raw.resize(m);
    out.state.pi_clamped.resize(m);
    out.state.weight_mass.resize(m);

    std::vector<double> indicator(m);
    for (std::size_t j = 0; j < m; ++j) {
        indicator[j] = static_cast<double>((p_test[j] > config.lambda ? 1 : 0) +
                                           (p_cal[j] > config.lambda ? 1 : 0));
    }

    auto finish_unit = [&](std::size_t i, double mass, double count, double f_at_t,
                           double f_at_cal) {
        const double pi_raw = 1.0 - count / (2.0 * (1.0 - config.lambda) * mass);
        const double pi_tilde = clamp_proportion(pi_raw, config.epsilon);
        out.state.pi_raw[i] = pi_raw;
        out.state.pi_clamped[i] = pi_tilde;
        out.state.weight_mass[i] = mass;
        const TestUnit& unit = data.units[i];
        out.u[i] = r_transform(clfdr_at(unit.t, f_at_t, pi_tilde, i), pi_tilde);
        out.u_tilde[i] = r_transform(clfdr_at(unit.t_cal, f_at_cal, pi_tilde, i), pi_tilde);
    };

    if (weights.is_group()) {
        const std::vector<std::int32_t>& ids = weights.group_ids();
        const std::size_t n_groups = weights.group_sizes().size();
        std::vector<std::vector<std::size_t>> members(n_groups);
        for (std::size_t j = 0; j < m; ++j) {
            members[static_cast<std::size_t>(ids[j])].push_back(j);
        }
        for (std::size_t g = 0; g < n_groups; ++g) {
            require(!members[g].empty(), ErrorCode::ZeroWeightRow, "empty weight group");
            const double mass = static_cast<double>(members[g].size());
            double count = 0.0;
            for (std::size_t j : members[g]) count += indicator[j];
            for (std::size_t i : members[g]) {
                const TestUnit& unit = data.units[i];
                double f_t = 0.0;
                double f_cal = 0.0;
                if constexpr (kNeedDensity) {
                    for (std::size_t j : members[g]) {
                        const TestUnit& other = data.units[j];
                        f_t += gauss_kernel(unit.t - other.t, inv_h, norm) +
                               gauss_kernel(unit.t - other.t_cal, inv_h, norm);
                        f_cal += gauss_kernel(unit.t_cal - other.t, inv_h, norm) +
                                 gauss_kernel(unit.t_cal - other.t_cal, inv_h, norm);
                    }
                }
                finish_unit(i, mass, count, f_t / (2.0 * mass), f_cal / (2.0 * mass));
            }
        }
    } else {
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = weights.row_data(i);
            const double mass = weights.row_sum(i);
            require(mass > 0.0, ErrorCode::ZeroWeightRow, "weight row has zero mass");
            const TestUnit& unit = data.units[i];
            double count = 0.0;
            double f_t = 0.0;
            double f_cal = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double w = row[j];
                const TestUnit& other = data.units[j];
                count += w * indicator[j];
                if constexpr (kNeedDensity) {
                    f_t += w * (gauss_kernel(unit.t - other.t, inv_h, norm) +
                                gauss_kernel(unit.t - other.t_cal, inv_h, norm));
                    f_cal += w * (gauss_kernel(unit.t_cal - other.t, inv_h, norm) +
                                  gauss_kernel(unit.t_cal - other.t_cal, inv_h, norm));
                }
            }
            finish_unit(i, mass, count, f_t / (2.0 * mass), f_cal / (2.0 * mass));
        }
    }
    return out;
}

inline double resolve_bandwidth(const Dataset& data, const ClawConfig& config) {
    if (config.bandwidth.kind == BandwidthRule::Kind::fixed) return config.bandwidth.h;
    std::vector<double> pooled;
    pooled.reserve(2 * data.units.size());
    for (const TestUnit& unit : data.units) pooled.push_back(unit.t);
    for (const TestUnit& unit : data.units) pooled.push_back(unit.t_cal);
    return silverman_bandwidth(std::move(pooled));
}

inline DecisionResult decide(std::vector<double> u, std::vector<double> u_tilde, double alpha) {
    DecisionResult decision;
    decision.tau = mirror_threshold(u, u_tilde, alpha);
    decision.rejected = reject_set(u, u_tilde, decision.tau);
    decision.evalues = evalues(u, u_tilde, decision.tau);
    decision.scores.resize(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        decision.scores[i] = ScorePair{u[i], u_tilde[i]};
    }
    return decision;
}

}  // namespace detail

inline ClawRun claw_run(const Dataset& data, const NullModel& f0, const ClawConfig& config,
                        std::shared_ptr<const WeightMatrix> weights) {
    validate_dataset(data, config);
    const std::size_t m = data.units.size();
    if (!weights) weights = build_weights(data, config);
    require(weights->size() == m, ErrorCode::LengthMismatch,
            "weight matrix size differs from m");

    std::vector<double> p_test(m);
    std::vector<double> p_cal(m);
    for (std::size_t j = 0; j < m; ++j) {
        p_test[j] = pvalue_from_null(data.units[j].t, f0.cdf, config.sidedness);
        p_cal[j] = pvalue_from_null(data.units[j].t_cal, f0.cdf, config.sidedness);
    }

    const double h = detail::resolve_bandwidth(data, config);
    auto clfdr_at = [&](double t, double f_hat, double pi_tilde, std::size_t) {
        return clfdr_score(f0.pdf(t), pi_tilde, f_hat, config.clfdr_cap, config.density_floor);
    };
    detail::ScoreVectors scores =
        detail::conformal_scores(data, *weights, p_test, p_cal, h, config, clfdr_at);

    ClawRun run;
    run.config = config;
    run.weight_matrix = std::move(weights);
    run.estimator_state = std::move(scores.state);
    run.decision = detail::decide(std::move(scores.u), std::move(scores.u_tilde), config.alpha);
    return run;
}

inline ClawRun claw_run(const Dataset& data, const NullModel& f0, const ClawConfig& config) {
    return claw_run(data, f0, config, nullptr);
}

// Known-model evaluators for simulation oracles.
struct TrueModel {
    std::function<double(const Covariate&)> pi;
    NullModel f0;
    std::function<double(double, const Covariate&)> f1_pdf;
};

// Oracle ranking scores R(t,s) = (1 - pi_s) f0(t) / (pi_s f1s(t));
// a vanishing denominator maps to +infinity (never rejected).
inline std::vector<ScorePair> oracle_scores(const Dataset& data, const TrueModel& model) {
    std::vector<ScorePair> scores(data.units.size());
    auto score_at = [&](double t, const Covariate& s) {
        const double pi = model.pi(s);
        const double denom = pi * model.f1_pdf(t, s);
        const double numer = (1.0 - pi) * model.f0.pdf(t);
        if (denom <= 0.0) return std::numeric_limits<double>::infinity();
        return numer / denom;
    };
    for (std::size_t i = 0; i < data.units.size(); ++i) {
        const TestUnit& unit = data.units[i];
        scores[i].u = score_at(unit.t, unit.s);
        scores[i].u_tilde = score_at(unit.t_cal, unit.s);
    }
    return scores;
}

}  // namespace claw
