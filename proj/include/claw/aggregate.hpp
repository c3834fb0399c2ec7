#pragma once
// Multi-source integration: average the generalized e-values from K runs
// with positive weights, then apply e-BH at the target level.

#include <cmath>
#include <span>
#include <vector>

#include "claw/error.hpp"
#include "claw/mirror.hpp"
#include "claw/pipeline.hpp"
#include "claw/types.hpp"

namespace claw {

struct EvaluePanel {
    std::vector<std::vector<double>> matrix;  // K rows of length m
    std::vector<double> weights;              // v_k, all positive

    std::size_t sources() const { return matrix.size(); }
    std::size_t hypotheses() const { return matrix.empty() ? 0 : matrix.front().size(); }

    void validate() const {
        require(!matrix.empty(), ErrorCode::EmptyInput, "e-value panel has no sources");
        require(weights.size() == matrix.size(), ErrorCode::DimensionMismatch,
                "one weight per source is required");
        const std::size_t m = matrix.front().size();
        require(m >= 1, ErrorCode::EmptyInput, "e-value panel has no hypotheses");
        for (const std::vector<double>& row : matrix) {
            require(row.size() == m, ErrorCode::DimensionMismatch,
                    "ragged e-value panel");
            for (double e : row) {
                require(std::isfinite(e) && e >= 0.0, ErrorCode::NonFiniteValue,
                        "e-values must be finite and non-negative");
            }
        }
        for (double v : weights) {
            require(std::isfinite(v) && v > 0.0, ErrorCode::NonPositiveWeight,
                    "e-value weights must be positive");
        }
    }
};

// e_bar_i = sum_k v_k e_i^(k) / sum_k v_k
inline std::vector<double> aggregate_evalues(const EvaluePanel& panel) {
    panel.validate();
    const std::size_t m = panel.hypotheses();
    double total_weight = 0.0;
    for (double v : panel.weights) total_weight += v;
    std::vector<double> averaged(m, 0.0);
    for (std::size_t k = 0; k < panel.sources(); ++k) {
        const double v = panel.weights[k];
        for (std::size_t i = 0; i < m; ++i) averaged[i] += v * panel.matrix[k][i];
    }
    for (double& e : averaged) e /= total_weight;
    return averaged;
}

inline IndexSet integrative_claw(const EvaluePanel& panel, double alpha) {
    return ebh(aggregate_evalues(panel), alpha);
}

// One source for the orchestrated form: the run is executed at its own level
// and contributes its e-value vector to the panel.
struct ClawSource {
    Dataset data;
    NullModel f0;
    ClawConfig config;
};

inline IndexSet integrative_claw(const std::vector<ClawSource>& sources,
                                 std::span<const double> weights, double alpha) {
    require(!sources.empty(), ErrorCode::EmptyInput, "no sources");
    EvaluePanel panel;
    panel.matrix.reserve(sources.size());
    for (const ClawSource& source : sources) {
        panel.matrix.push_back(claw_run(source.data, source.f0, source.config).decision.evalues);
    }
    if (weights.empty()) {
        panel.weights.assign(sources.size(), 1.0);
    } else {
        panel.weights.assign(weights.begin(), weights.end());
    }
    return integrative_claw(panel, alpha);
}

}  // namespace claw
