#pragma once
// Covariate-driven locality weights w_ij. Group weights keep a compact
// partition representation; kernel and custom weights are dense m-by-m.
// Either way the matrix is immutable and row sums are precomputed.

#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "claw/distributions.hpp"
#include "claw/error.hpp"
#include "claw/types.hpp"

namespace claw {

enum class DistanceNorm { abs, euclidean };

class WeightMatrix {
public:
    static WeightMatrix group(const std::vector<Covariate>& covariates) {
        require(!covariates.empty(), ErrorCode::EmptyInput, "group weights need covariates");
        WeightMatrix w;
        w.m_ = covariates.size();
        w.group_ids_.resize(w.m_);
        std::unordered_map<std::string, std::int32_t> ids;
        for (std::size_t i = 0; i < w.m_; ++i) {
            require(covariates[i].is_categorical(), ErrorCode::MixedCovariateKinds,
                    "group weights need categorical covariates");
            auto [it, inserted] =
                ids.emplace(covariates[i].label(), static_cast<std::int32_t>(ids.size()));
            w.group_ids_[i] = it->second;
            if (inserted) w.group_sizes_.push_back(0);
            ++w.group_sizes_[static_cast<std::size_t>(it->second)];
        }
        w.row_sums_.resize(w.m_);
        for (std::size_t i = 0; i < w.m_; ++i) {
            w.row_sums_[i] =
                static_cast<double>(w.group_sizes_[static_cast<std::size_t>(w.group_ids_[i])]);
        }
        return w;
    }

    static WeightMatrix gaussian(const std::vector<Covariate>& covariates, double scale,
                                 DistanceNorm norm, double truncate_below = 0.0) {
        require(!covariates.empty(), ErrorCode::EmptyInput, "kernel weights need covariates");
        require(scale > 0.0, ErrorCode::NonPositiveScale, "kernel weight scale must be positive");
        const std::size_t m = covariates.size();
        const std::size_t dim = covariates.front().dim();
        for (const Covariate& s : covariates) {
            require(s.is_real() && s.dim() == dim && dim >= 1, ErrorCode::MixedCovariateKinds,
                    "kernel weights need real covariates of one dimension");
        }
        WeightMatrix w;
        w.m_ = m;
        w.dense_.assign(m * m, 0.0);
        // Distance evaluated once per unordered pair keeps symmetry exact.
        for (std::size_t i = 0; i < m; ++i) {
            w.dense_[i * m + i] = normal_pdf(0.0);
            const std::vector<double>& a = covariates[i].coords();
            for (std::size_t j = i + 1; j < m; ++j) {
                const std::vector<double>& b = covariates[j].coords();
                double dist = 0.0;
                if (norm == DistanceNorm::abs && dim == 1) {
                    dist = std::abs(a[0] - b[0]);
                } else {
                    double ss = 0.0;
                    for (std::size_t c = 0; c < dim; ++c) {
                        const double d = a[c] - b[c];
                        ss += d * d;
                    }
                    dist = std::sqrt(ss);
                }
                double value = normal_pdf(dist / scale);
                if (value < truncate_below) value = 0.0;
                w.dense_[i * m + j] = value;
                w.dense_[j * m + i] = value;
            }
        }
        w.finish_dense();
        return w;
    }

    static WeightMatrix custom(const std::vector<Covariate>& covariates,
                               const std::function<double(const Covariate&, const Covariate&)>& fn) {
        require(!covariates.empty(), ErrorCode::EmptyInput, "custom weights need covariates");
        require(static_cast<bool>(fn), ErrorCode::InvalidConfig, "custom weight hook is empty");
        const std::size_t m = covariates.size();
        WeightMatrix w;
        w.m_ = m;
        w.dense_.assign(m * m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                const double value = fn(covariates[i], covariates[j]);
                require(std::isfinite(value) && value >= 0.0, ErrorCode::NonFiniteValue,
                        "custom weight must be finite and non-negative");
                w.dense_[i * m + j] = value;
            }
        }
        w.finish_dense();
        return w;
    }

    std::size_t size() const { return m_; }

    double at(std::size_t i, std::size_t j) const {
        if (is_group()) return group_ids_[i] == group_ids_[j] ? 1.0 : 0.0;
        return dense_[i * m_ + j];
    }

    double row_sum(std::size_t i) const { return row_sums_[i]; }

    bool is_group() const { return dense_.empty(); }

    // Group representation accessors (only valid when is_group()).
    const std::vector<std::int32_t>& group_ids() const { return group_ids_; }
    const std::vector<std::size_t>& group_sizes() const { return group_sizes_; }

    // Dense row pointer (only valid when !is_group()).
    const double* row_data(std::size_t i) const { return dense_.data() + i * m_; }

private:
    WeightMatrix() = default;

    void finish_dense() {
        row_sums_.assign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < m_; ++j) sum += dense_[i * m_ + j];
            if (dense_[i * m_ + i] <= 0.0) {
                raise(ErrorCode::ZeroWeightRow, "w_ii must be positive (row " + std::to_string(i) + ")");
            }
            if (sum <= 0.0) {
                raise(ErrorCode::ZeroWeightRow, "weight row " + std::to_string(i) + " sums to zero");
            }
            row_sums_[i] = sum;
        }
    }

    std::size_t m_ = 0;
    std::vector<double> dense_;              // row-major, empty for group weights
    std::vector<std::int32_t> group_ids_;    // per-unit group index
    std::vector<std::size_t> group_sizes_;
    std::vector<double> row_sums_;
};

// w_ij = I{S_i = S_j} for categorical covariates.
inline WeightMatrix group_weights(const std::vector<Covariate>& covariates) {
    return WeightMatrix::group(covariates);
}

// w_ij = phi(d(S_i,S_j)/scale) with the standard Gaussian density phi.
inline WeightMatrix kernel_weights(const std::vector<Covariate>& covariates, double scale,
                                   DistanceNorm norm = DistanceNorm::euclidean,
                                   double truncate_below = 0.0) {
    return WeightMatrix::gaussian(covariates, scale, norm, truncate_below);
}

inline std::vector<Covariate> covariates_of(const Dataset& data) {
    std::vector<Covariate> out;
    out.reserve(data.units.size());
    for (const TestUnit& unit : data.units) out.push_back(unit.s);
    return out;
}

}  // namespace claw
