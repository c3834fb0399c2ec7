#pragma once
// Shared domain types: test units, datasets, configuration, decision results.
// Everything here is immutable after construction and safe to share read-only
// across concurrent workers.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "claw/error.hpp"

namespace claw {

using IndexSet = std::vector<std::size_t>;  // sorted ascending

// Covariate tagged union: a categorical label or a real vector of dim >= 1.
// Grouped, ordinal and spatial settings all flow through this one type.
class Covariate {
public:
    static Covariate category(std::string label) { return Covariate(std::move(label)); }
    static Covariate real(std::vector<double> coords) { return Covariate(std::move(coords)); }
    static Covariate real1(double x) { return Covariate(std::vector<double>{x}); }

    bool is_categorical() const { return std::holds_alternative<std::string>(value_); }
    bool is_real() const { return !is_categorical(); }

    const std::string& label() const { return std::get<std::string>(value_); }
    const std::vector<double>& coords() const { return std::get<std::vector<double>>(value_); }
    std::size_t dim() const { return is_real() ? coords().size() : 0; }

    bool operator==(const Covariate& other) const { return value_ == other.value_; }

private:
    explicit Covariate(std::string label) : value_(std::move(label)) {}
    explicit Covariate(std::vector<double> coords) : value_(std::move(coords)) {}

    std::variant<std::string, std::vector<double>> value_;
};

// One hypothesis: primary statistic, covariate, paired calibration statistic.
struct TestUnit {
    double t = 0.0;
    Covariate s = Covariate::category("");
    double t_cal = 0.0;
};

struct Dataset {
    std::vector<TestUnit> units;
    std::optional<std::vector<double>> null_pool;       // labeled nulls, semi-supervised setup
    std::optional<std::vector<std::uint8_t>> truth;     // theta_i, simulation only

    std::size_t size() const { return units.size(); }
};

enum class Sidedness { two_sided, left, right };

struct BandwidthRule {
    enum class Kind { silverman, fixed };
    Kind kind = Kind::silverman;
    double h = 0.0;

    static BandwidthRule silverman() { return BandwidthRule{}; }
    static BandwidthRule fixed(double h) { return BandwidthRule{Kind::fixed, h}; }
};

struct WeightSpec {
    enum class Kind { group, gaussian, custom };
    Kind kind = Kind::group;
    double scale = 1.0;
    // Hook for arbitrary non-negative decreasing-in-distance weights.
    std::function<double(const Covariate&, const Covariate&)> custom_fn;

    static WeightSpec group() { return WeightSpec{}; }
    static WeightSpec gaussian(double scale) { return WeightSpec{Kind::gaussian, scale, nullptr}; }
    static WeightSpec custom(std::function<double(const Covariate&, const Covariate&)> fn) {
        return WeightSpec{Kind::custom, 1.0, std::move(fn)};
    }
};

struct ClawConfig {
    double alpha = 0.05;           // target FDR level
    double lambda = 0.5;           // screening threshold
    double epsilon = 0.001;        // proportion clamp
    double clfdr_cap = 0.999;      // upper clamp c
    double density_floor = 1e-12;  // lower bound used when dividing by the density
    BandwidthRule bandwidth = BandwidthRule::silverman();
    WeightSpec weights = WeightSpec::group();
    Sidedness sidedness = Sidedness::two_sided;
    std::uint64_t seed = 0;
    double train_fraction = 0.5;   // share of the null-pool remainder going to tr1

    void validate() const {
        require(alpha > 0.0 && alpha < 1.0, ErrorCode::InvalidConfig, "alpha must be in (0,1)");
        require(lambda > 0.0 && lambda < 1.0, ErrorCode::InvalidConfig, "lambda must be in (0,1)");
        require(epsilon > 0.0 && epsilon < 0.5, ErrorCode::InvalidConfig,
                "epsilon must be in (0,1/2)");
        require(clfdr_cap > 0.0 && clfdr_cap < 1.0, ErrorCode::InvalidConfig,
                "clfdr_cap must be in (0,1)");
        require(density_floor > 0.0, ErrorCode::InvalidConfig, "density_floor must be positive");
        if (bandwidth.kind == BandwidthRule::Kind::fixed) {
            require(bandwidth.h > 0.0, ErrorCode::InvalidConfig, "fixed bandwidth must be positive");
        }
        if (weights.kind == WeightSpec::Kind::gaussian) {
            require(weights.scale > 0.0, ErrorCode::InvalidConfig,
                    "gaussian weight scale must be positive");
        }
        if (weights.kind == WeightSpec::Kind::custom) {
            require(static_cast<bool>(weights.custom_fn), ErrorCode::InvalidConfig,
                    "custom weight hook is empty");
        }
        require(train_fraction > 0.0 && train_fraction < 1.0, ErrorCode::InvalidConfig,
                "train_fraction must be in (0,1)");
    }
};

struct ScorePair {
    double u = 0.0;        // score at the test statistic
    double u_tilde = 0.0;  // score at the calibration statistic
};

// tau = -infinity is the "no rejection" sentinel.
inline constexpr double kNoThreshold = -std::numeric_limits<double>::infinity();

struct DecisionResult {
    IndexSet rejected;
    double tau = kNoThreshold;
    std::vector<double> evalues;
    std::vector<ScorePair> scores;
};

// Checks every type invariant; returns the dataset unchanged (idempotent).
inline const Dataset& validate_dataset(const Dataset& data, const ClawConfig& config) {
    config.validate();
    require(!data.units.empty(), ErrorCode::EmptyDataset, "dataset has no units");
    const bool categorical = data.units.front().s.is_categorical();
    const std::size_t dim = categorical ? 0 : data.units.front().s.dim();
    for (std::size_t i = 0; i < data.units.size(); ++i) {
        const TestUnit& unit = data.units[i];
        if (!std::isfinite(unit.t) || !std::isfinite(unit.t_cal)) {
            raise(ErrorCode::NonFiniteValue, "non-finite statistic at unit " + std::to_string(i));
        }
        if (unit.s.is_categorical() != categorical) {
            raise(ErrorCode::MixedCovariateKinds,
                  "mixed covariate kinds at unit " + std::to_string(i));
        }
        if (!categorical) {
            if (unit.s.dim() != dim || dim < 1) {
                raise(ErrorCode::MixedCovariateKinds,
                      "covariate dimension mismatch at unit " + std::to_string(i));
            }
            for (double c : unit.s.coords()) {
                if (!std::isfinite(c)) {
                    raise(ErrorCode::NonFiniteValue,
                          "non-finite covariate at unit " + std::to_string(i));
                }
            }
        }
    }
    if (data.null_pool) {
        for (double v : *data.null_pool) {
            require(std::isfinite(v), ErrorCode::NonFiniteValue, "non-finite null pool value");
        }
    }
    if (data.truth) {
        require(data.truth->size() == data.units.size(), ErrorCode::LengthMismatch,
                "truth length differs from m");
    }
    return data;
}

}  // namespace claw
