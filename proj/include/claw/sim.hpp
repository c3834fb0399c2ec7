#pragma once
// Deterministic data generators for the grouped, ordinal and 2-D lattice
// simulation families, FDP/TDP metrics, and the seeded replication engine.
//
// Each replication r draws from streams keyed by mix(master_seed, r), so
// summaries are bit-identical for any worker count.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "claw/aggregate.hpp"
#include "claw/baselines.hpp"
#include "claw/error.hpp"
#include "claw/io.hpp"
#include "claw/pipeline.hpp"
#include "claw/rng.hpp"
#include "claw/semisup.hpp"
#include "claw/types.hpp"

namespace claw {

enum class Family { grouped, ordinal, spatial2d };

inline const char* to_string(Family family) {
    switch (family) {
        case Family::grouped: return "grouped";
        case Family::ordinal: return "ordinal";
        case Family::spatial2d: return "spatial2d";
    }
    return "?";
}

inline Family family_from_string(const std::string& name) {
    if (name == "grouped") return Family::grouped;
    if (name == "ordinal") return Family::ordinal;
    if (name == "spatial2d") return Family::spatial2d;
    raise(ErrorCode::UnknownSetting, "unknown family: " + name);
}

struct GeneratorSpec {
    Family family = Family::grouped;
    int setting = 1;
    std::string param_name = "mu";
    double param_value = 3.0;
    std::uint64_t seed = 0;
    bool full_null = false;          // custom variant: every pi_s forced to 0
    std::size_t null_pool_size = 0;  // optional labeled-null pool (iid from the null)

    std::string param_string() const { return param_name + "=" + format_double(param_value); }
};

namespace detail {

struct UnitModel {
    double pi = 0.0;
    double f1_mean = 0.0;
    double f1_sd = 1.0;
};

struct ResolvedModel {
    std::vector<Covariate> covariates;
    std::vector<UnitModel> units;
};

inline void check_param(const GeneratorSpec& spec, const char* expected) {
    if (spec.param_name != expected) {
        raise(ErrorCode::UnknownSetting, std::string("setting sweeps '") + expected +
                                             "', got '" + spec.param_name + "'");
    }
    require(std::isfinite(spec.param_value), ErrorCode::NonFiniteValue,
            "swept parameter must be finite");
}

inline bool in_blocks(double s, std::initializer_list<std::pair<int, int>> blocks) {
    for (const auto& [lo, hi] : blocks) {
        if (s >= lo && s <= hi) return true;
    }
    return false;
}

inline ResolvedModel resolve_grouped(const GeneratorSpec& spec) {
    double pi1 = 0.2;
    double pi2 = 0.1;
    UnitModel g1{pi1, 0.0, 1.0};
    UnitModel g2{pi2, 0.0, 1.0};
    std::size_t m1 = 3000;
    std::size_t m2 = 1500;
    switch (spec.setting) {
        case 1:
            check_param(spec, "mu");
            g1 = UnitModel{0.2, spec.param_value, 1.0};
            g2 = UnitModel{0.1, -2.0, 0.5};
            break;
        case 2:
            check_param(spec, "pi");
            require(spec.param_value > 0.0 && spec.param_value < 1.0, ErrorCode::UnknownSetting,
                    "pi must be in (0,1)");
            g1 = UnitModel{0.2, 2.0, 1.0};
            g2 = UnitModel{spec.param_value, -4.0, 1.0};
            break;
        case 3:
            check_param(spec, "m2");
            require(spec.param_value >= 1.0, ErrorCode::UnknownSetting, "m2 must be >= 1");
            g1 = UnitModel{0.2, 2.0, 0.5};
            g2 = UnitModel{0.1, -4.0, 1.0};
            m2 = static_cast<std::size_t>(spec.param_value);
            break;
        default:
            raise(ErrorCode::UnknownSetting,
                  "grouped setting must be 1..3, got " + std::to_string(spec.setting));
    }
    ResolvedModel model;
    model.covariates.reserve(m1 + m2);
    model.units.reserve(m1 + m2);
    for (std::size_t i = 0; i < m1; ++i) {
        model.covariates.push_back(Covariate::category("1"));
        model.units.push_back(g1);
    }
    for (std::size_t i = 0; i < m2; ++i) {
        model.covariates.push_back(Covariate::category("2"));
        model.units.push_back(g2);
    }
    return model;
}

inline ResolvedModel resolve_ordinal(const GeneratorSpec& spec) {
    constexpr std::size_t m = 3000;
    ResolvedModel model;
    model.covariates.reserve(m);
    model.units.reserve(m);
    for (std::size_t i = 1; i <= m; ++i) {
        const double s = static_cast<double>(i);
        UnitModel unit;
        switch (spec.setting) {
            case 1:
                check_param(spec, "mu");
                unit.f1_mean = spec.param_value;
                unit.f1_sd = 1.0;
                if (in_blocks(s, {{201, 350}, {1501, 1650}})) {
                    unit.pi = 0.6;
                } else if (in_blocks(s, {{801, 1000}, {2101, 2300}})) {
                    unit.pi = 0.3;
                } else {
                    unit.pi = 0.02;
                }
                break;
            case 2:
                check_param(spec, "pi");
                require(spec.param_value > 0.0 && spec.param_value <= 0.5,
                        ErrorCode::UnknownSetting, "pi must be in (0,1/2] so 2*pi stays valid");
                if (s <= 1500.0) {
                    unit.f1_mean = -2.5;
                    unit.f1_sd = 1.0;
                } else {
                    unit.f1_mean = 3.6;
                    unit.f1_sd = 1.5;
                }
                if (in_blocks(s, {{201, 350}, {1501, 1650}})) {
                    unit.pi = 2.0 * spec.param_value;
                } else if (in_blocks(s, {{801, 1000}, {2101, 2300}})) {
                    unit.pi = spec.param_value;
                } else {
                    unit.pi = 0.02;
                }
                break;
            case 3:
                check_param(spec, "mu");
                unit.f1_mean = spec.param_value + 0.15 * std::sin(0.6 * s);
                unit.f1_sd = 1.0;
                if (in_blocks(s, {{201, 500}, {801, 1100}, {1501, 1800}, {2101, 2400}})) {
                    unit.pi = 0.4 * (1.0 + std::sin(0.02 * s));
                } else {
                    unit.pi = 0.02;
                }
                break;
            default:
                raise(ErrorCode::UnknownSetting,
                      "ordinal setting must be 1..3, got " + std::to_string(spec.setting));
        }
        model.covariates.push_back(Covariate::real1(s));
        model.units.push_back(unit);
    }
    return model;
}

inline bool in_ring(double x, double y, double lo, double hi) {
    const double r2 = (x - 30.0) * (x - 30.0) + (y - 70.0) * (y - 70.0);
    return r2 >= lo && r2 <= hi;
}

inline bool in_square(double x, double y) {
    return x >= 62.0 && x <= 90.0 && y >= 10.0 && y <= 38.0;
}

inline ResolvedModel resolve_spatial(const GeneratorSpec& spec) {
    constexpr int side = 100;
    double elevated_pi = 0.75;
    double ring_lo = 10.0;
    double ring_hi = 20.0;
    double f1_mean = 0.0;
    switch (spec.setting) {
        case 1:
            check_param(spec, "mu");
            f1_mean = spec.param_value;
            break;
        case 2:
            check_param(spec, "pi");
            require(spec.param_value > 0.0 && spec.param_value < 1.0, ErrorCode::UnknownSetting,
                    "pi must be in (0,1)");
            elevated_pi = spec.param_value;
            f1_mean = 2.8;
            break;
        case 3:
            check_param(spec, "R");
            require(spec.param_value > 0.0, ErrorCode::UnknownSetting, "R must be positive");
            ring_lo = spec.param_value / 2.0;
            ring_hi = spec.param_value;
            f1_mean = 2.5;
            break;
        default:
            raise(ErrorCode::UnknownSetting,
                  "spatial2d setting must be 1..3, got " + std::to_string(spec.setting));
    }
    ResolvedModel model;
    model.covariates.reserve(side * side);
    model.units.reserve(side * side);
    for (int x = 1; x <= side; ++x) {
        for (int y = 1; y <= side; ++y) {
            const double xv = static_cast<double>(x);
            const double yv = static_cast<double>(y);
            UnitModel unit;
            unit.f1_mean = f1_mean;
            unit.f1_sd = 1.0;
            unit.pi = (in_ring(xv, yv, ring_lo, ring_hi) || in_square(xv, yv)) ? elevated_pi : 0.02;
            model.covariates.push_back(Covariate::real({xv, yv}));
            model.units.push_back(unit);
        }
    }
    return model;
}

inline ResolvedModel resolve(const GeneratorSpec& spec) {
    ResolvedModel model;
    switch (spec.family) {
        case Family::grouped: model = resolve_grouped(spec); break;
        case Family::ordinal: model = resolve_ordinal(spec); break;
        case Family::spatial2d: model = resolve_spatial(spec); break;
    }
    if (spec.full_null) {
        for (UnitModel& unit : model.units) unit.pi = 0.0;
    }
    return model;
}

}  // namespace detail

// Per-unit signal rates pi_s in unit order; lets tests enumerate the design.
inline std::vector<double> signal_rates(const GeneratorSpec& spec) {
    const detail::ResolvedModel model = detail::resolve(spec);
    std::vector<double> rates(model.units.size());
    for (std::size_t i = 0; i < rates.size(); ++i) rates[i] = model.units[i].pi;
    return rates;
}

// Covariates in unit order, without drawing any data.
inline std::vector<Covariate> design_covariates(const GeneratorSpec& spec) {
    return detail::resolve(spec).covariates;
}

inline Dataset generate(const GeneratorSpec& spec) {
    const detail::ResolvedModel model = detail::resolve(spec);
    const std::size_t m = model.units.size();
    Rng theta_rng = stream_rng(spec.seed, 0, 1);
    Rng test_rng = stream_rng(spec.seed, 0, 2);
    Rng cal_rng = stream_rng(spec.seed, 0, 3);

    Dataset data;
    data.units.resize(m);
    data.truth.emplace(m, 0);
    for (std::size_t i = 0; i < m; ++i) {
        const detail::UnitModel& unit = model.units[i];
        const bool signal = theta_rng.next_bernoulli(unit.pi);
        (*data.truth)[i] = signal ? 1 : 0;
        data.units[i].s = model.covariates[i];
        data.units[i].t = signal ? test_rng.next_normal(unit.f1_mean, unit.f1_sd)
                                 : test_rng.next_normal();
        data.units[i].t_cal = cal_rng.next_normal();
    }
    if (spec.null_pool_size > 0) {
        Rng pool_rng = stream_rng(spec.seed, 0, 4);
        std::vector<double> pool(spec.null_pool_size);
        for (double& v : pool) v = pool_rng.next_normal();
        data.null_pool = std::move(pool);
    }
    return data;
}

namespace detail {

inline bool covariate_less(const Covariate& a, const Covariate& b) {
    if (a.is_categorical() != b.is_categorical()) return a.is_categorical();
    if (a.is_categorical()) return a.label() < b.label();
    return a.coords() < b.coords();
}

}  // namespace detail

// Known-model evaluators matching the generator, for oracle score runs.
// Lookups binary-search the design covariates.
inline TrueModel oracle_model(const GeneratorSpec& spec) {
    auto model = std::make_shared<const detail::ResolvedModel>(detail::resolve(spec));
    auto order = std::make_shared<std::vector<std::size_t>>(model->covariates.size());
    std::iota(order->begin(), order->end(), std::size_t{0});
    std::sort(order->begin(), order->end(), [&](std::size_t a, std::size_t b) {
        return detail::covariate_less(model->covariates[a], model->covariates[b]);
    });
    auto lookup = [model, order](const Covariate& s) -> const detail::UnitModel& {
        auto it = std::lower_bound(order->begin(), order->end(), s,
                                   [&](std::size_t idx, const Covariate& query) {
                                       return detail::covariate_less(model->covariates[idx],
                                                                     query);
                                   });
        if (it == order->end() || !(model->covariates[*it] == s)) {
            raise(ErrorCode::IndexOutOfRange, "covariate not part of the design");
        }
        return model->units[*it];
    };
    TrueModel truth;
    truth.f0 = standard_normal_null();
    truth.pi = [lookup](const Covariate& s) { return lookup(s).pi; };
    truth.f1_pdf = [lookup](double t, const Covariate& s) {
        const detail::UnitModel& unit = lookup(s);
        return normal_pdf(t, unit.f1_mean, unit.f1_sd);
    };
    return truth;
}

struct FdpTdp {
    double fdp = 0.0;
    double tdp = 0.0;
    std::size_t false_positives = 0;
    std::size_t rejections = 0;
};

inline FdpTdp fdp_tdp(const IndexSet& rejected, const std::vector<std::uint8_t>& truth) {
    FdpTdp out;
    out.rejections = rejected.size();
    std::size_t true_positives = 0;
    for (std::size_t i : rejected) {
        if (i >= truth.size()) {
            raise(ErrorCode::IndexOutOfRange, "rejected index " + std::to_string(i) +
                                                  " outside truth of length " +
                                                  std::to_string(truth.size()));
        }
        if (truth[i]) {
            ++true_positives;
        } else {
            ++out.false_positives;
        }
    }
    std::size_t signals = 0;
    for (std::uint8_t bit : truth) signals += bit;
    out.fdp = static_cast<double>(out.false_positives) /
              static_cast<double>(std::max<std::size_t>(out.rejections, 1));
    out.tdp = static_cast<double>(true_positives) /
              static_cast<double>(std::max<std::size_t>(signals, 1));
    return out;
}

struct SimContext {
    GeneratorSpec spec;
    ClawConfig config;  // seed already set for this replication
    NullModel f0;
    std::shared_ptr<const WeightMatrix> weights;  // shared across replications
    TrueModel oracle;
};

namespace detail {

inline std::vector<double> test_pvalues(const Dataset& data, const SimContext& ctx) {
    std::vector<double> p(data.units.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = pvalue_from_null(data.units[i].t, ctx.f0.cdf, ctx.config.sidedness);
    }
    return p;
}

inline std::vector<double> cal_pvalues(const Dataset& data, const SimContext& ctx) {
    std::vector<double> p(data.units.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = pvalue_from_null(data.units[i].t_cal, ctx.f0.cdf, ctx.config.sidedness);
    }
    return p;
}

inline std::vector<std::string> unit_labels(const Dataset& data) {
    std::vector<std::string> labels(data.units.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        require(data.units[i].s.is_categorical(), ErrorCode::InvalidConfig,
                "separate analysis needs categorical covariates");
        labels[i] = data.units[i].s.label();
    }
    return labels;
}

}  // namespace detail

inline IndexSet run_method(const std::string& method, const Dataset& data,
                           const SimContext& ctx) {
    if (method == "claw") {
        return claw_run(data, ctx.f0, ctx.config, ctx.weights).decision.rejected;
    }
    if (method == "semisup_claw") {
        return semisup_claw_run(data, ctx.config, ctx.weights).decision.rejected;
    }
    if (method == "oracle_claw") {
        const std::vector<ScorePair> pairs = oracle_scores(data, ctx.oracle);
        std::vector<double> u(pairs.size());
        std::vector<double> u_tilde(pairs.size());
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            u[i] = pairs[i].u;
            u_tilde[i] = pairs[i].u_tilde;
        }
        return reject_set(u, u_tilde, mirror_threshold(u, u_tilde, ctx.config.alpha));
    }
    if (method == "bh") {
        return bh(detail::test_pvalues(data, ctx), ctx.config.alpha);
    }
    if (method == "storey_bh") {
        return storey_bh(detail::test_pvalues(data, ctx), ctx.config.alpha, ctx.config.lambda);
    }
    if (method == "cbh") {
        // Pooled conformal BH with the p-value as conformity score.
        return cbh_threshold(detail::test_pvalues(data, ctx), detail::cal_pvalues(data, ctx),
                             ctx.config.alpha)
            .rejected;
    }
    if (method == "separate_bh") {
        return separate_bh(detail::test_pvalues(data, ctx), detail::unit_labels(data),
                           ctx.config.alpha);
    }
    if (method == "separate_cbh") {
        return separate_cbh(detail::test_pvalues(data, ctx), detail::cal_pvalues(data, ctx),
                            detail::unit_labels(data), ctx.config.alpha);
    }
    raise(ErrorCode::UnknownSetting, "unknown method: " + method);
}

inline std::vector<std::string> known_methods() {
    return {"claw", "semisup_claw", "oracle_claw", "bh", "storey_bh", "cbh", "separate_bh",
            "separate_cbh"};
}

// Per-replication weight spec defaults: group indicators for grouped designs,
// the documented Gaussian scales for the ordinal (150) and lattice (15) ones.
inline ClawConfig default_sim_config(const GeneratorSpec& spec) {
    ClawConfig config;
    switch (spec.family) {
        case Family::grouped: config.weights = WeightSpec::group(); break;
        case Family::ordinal: config.weights = WeightSpec::gaussian(150.0); break;
        case Family::spatial2d: config.weights = WeightSpec::gaussian(15.0); break;
    }
    return config;
}

struct MethodSummary {
    std::string method;
    double fdr = 0.0;
    double fdr_se = 0.0;
    double ap = 0.0;
    double ap_se = 0.0;
    double mfdr = 0.0;
    std::vector<double> fdp_by_rep;
    std::vector<double> tdp_by_rep;
};

struct ReplicationSummary {
    GeneratorSpec spec;
    double alpha = 0.0;
    std::size_t n_reps = 0;
    bool se_degenerate = false;  // n_reps == 1: SEs reported as 0
    double wall_seconds = 0.0;
    std::vector<MethodSummary> methods;
};

inline ReplicationSummary replicate(const GeneratorSpec& spec,
                                    const std::vector<std::string>& methods, std::size_t n_reps,
                                    std::uint64_t master_seed, unsigned workers,
                                    const ClawConfig& base_config) {
    require(n_reps >= 1, ErrorCode::InvalidConfig, "n_reps must be at least 1");
    require(!methods.empty(), ErrorCode::EmptyInput, "no methods requested");
    require(workers >= 1, ErrorCode::InvalidConfig, "workers must be at least 1");
    base_config.validate();
    const auto start = std::chrono::steady_clock::now();

    SimContext shared;
    shared.spec = spec;
    shared.config = base_config;
    shared.f0 = standard_normal_null();
    shared.oracle = oracle_model(spec);
    const bool needs_weights =
        std::any_of(methods.begin(), methods.end(), [](const std::string& name) {
            return name == "claw" || name == "semisup_claw";
        });
    if (needs_weights) {
        // Covariates are a deterministic function of the design, so one
        // matrix serves every replication read-only.
        GeneratorSpec probe = spec;
        probe.null_pool_size = 0;
        probe.seed = 0;
        Dataset prototype = generate(probe);
        shared.weights = build_weights(prototype, base_config);
    }

    struct RepRecord {
        std::vector<FdpTdp> by_method;
    };
    std::vector<RepRecord> records(n_reps);
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::string failure_message;
    bool failed = false;

    auto worker = [&]() {
        for (;;) {
            const std::size_t r = next.fetch_add(1);
            if (r >= n_reps) return;
            {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failed) return;
            }
            const std::uint64_t rep_seed = mix_seed(master_seed, r);
            try {
                GeneratorSpec rep_spec = spec;
                rep_spec.seed = rep_seed;
                const Dataset data = generate(rep_spec);
                SimContext ctx = shared;
                ctx.config.seed = rep_seed;
                RepRecord record;
                record.by_method.reserve(methods.size());
                for (const std::string& method : methods) {
                    const IndexSet rejected = run_method(method, data, ctx);
                    record.by_method.push_back(fdp_tdp(rejected, *data.truth));
                }
                records[r] = std::move(record);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failed) {
                    failed = true;
                    failure_message = "replication " + std::to_string(r) + " (seed " +
                                      std::to_string(rep_seed) + ") failed: " + e.what();
                }
                return;
            }
        }
    };

    const unsigned n_threads = static_cast<unsigned>(
        std::min<std::size_t>(workers, n_reps));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    if (failed) raise(ErrorCode::InternalError, failure_message);

    ReplicationSummary summary;
    summary.spec = spec;
    summary.alpha = base_config.alpha;
    summary.n_reps = n_reps;
    summary.se_degenerate = n_reps == 1;
    for (std::size_t k = 0; k < methods.size(); ++k) {
        MethodSummary ms;
        ms.method = methods[k];
        ms.fdp_by_rep.resize(n_reps);
        ms.tdp_by_rep.resize(n_reps);
        std::size_t total_fp = 0;
        std::size_t total_rej = 0;
        for (std::size_t r = 0; r < n_reps; ++r) {
            const FdpTdp& rec = records[r].by_method[k];
            ms.fdp_by_rep[r] = rec.fdp;
            ms.tdp_by_rep[r] = rec.tdp;
            total_fp += rec.false_positives;
            total_rej += rec.rejections;
        }
        auto mean_se = [n_reps](const std::vector<double>& xs) {
            double mean = 0.0;
            for (double x : xs) mean += x;
            mean /= static_cast<double>(n_reps);
            if (n_reps < 2) return std::pair<double, double>{mean, 0.0};
            double ss = 0.0;
            for (double x : xs) ss += (x - mean) * (x - mean);
            const double sd = std::sqrt(ss / static_cast<double>(n_reps - 1));
            return std::pair<double, double>{mean, sd / std::sqrt(static_cast<double>(n_reps))};
        };
        std::tie(ms.fdr, ms.fdr_se) = mean_se(ms.fdp_by_rep);
        std::tie(ms.ap, ms.ap_se) = mean_se(ms.tdp_by_rep);
        ms.mfdr = total_rej == 0 ? 0.0
                                 : static_cast<double>(total_fp) / static_cast<double>(total_rej);
        summary.methods.push_back(std::move(ms));
    }
    summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return summary;
}

inline void write_summary_csv_header(std::ostream& out) {
    write_csv_row(out, {"method", "setting", "param", "fdr", "fdr_se", "ap", "ap_se", "mfdr",
                        "n_reps"});
}

inline void write_summary_csv_rows(std::ostream& out, const ReplicationSummary& summary) {
    const std::string setting =
        std::string(to_string(summary.spec.family)) + ":" + std::to_string(summary.spec.setting);
    for (const MethodSummary& ms : summary.methods) {
        write_csv_row(out, {ms.method, setting, summary.spec.param_string(),
                            format_double(ms.fdr), format_double(ms.fdr_se), format_double(ms.ap),
                            format_double(ms.ap_se), format_double(ms.mfdr),
                            std::to_string(summary.n_reps)});
    }
}

inline void write_summary_csv(std::ostream& out, const ReplicationSummary& summary) {
    write_summary_csv_header(out);
    write_summary_csv_rows(out, summary);
}

// Fixed-schema JSON form of the same summary. Wall time is deliberately
// omitted so identical runs serialize byte-identically.
inline void write_summary_json(std::ostream& out, const ReplicationSummary& summary) {
    out << "{\n";
    out << "  \"family\": \"" << to_string(summary.spec.family) << "\",\n";
    out << "  \"setting\": " << summary.spec.setting << ",\n";
    out << "  \"param\": \"" << summary.spec.param_string() << "\",\n";
    out << "  \"alpha\": " << format_double(summary.alpha) << ",\n";
    out << "  \"n_reps\": " << summary.n_reps << ",\n";
    out << "  \"se_degenerate\": " << (summary.se_degenerate ? "true" : "false") << ",\n";
    out << "  \"methods\": [\n";
    for (std::size_t k = 0; k < summary.methods.size(); ++k) {
        const MethodSummary& ms = summary.methods[k];
        out << "    {\"method\": \"" << ms.method << "\", \"fdr\": " << format_double(ms.fdr)
            << ", \"fdr_se\": " << format_double(ms.fdr_se)
            << ", \"ap\": " << format_double(ms.ap) << ", \"ap_se\": " << format_double(ms.ap_se)
            << ", \"mfdr\": " << format_double(ms.mfdr) << "}"
            << (k + 1 < summary.methods.size() ? "," : "") << "\n";
    }
    out << "  ]\n";
    out << "}\n";
}

}  // namespace claw
