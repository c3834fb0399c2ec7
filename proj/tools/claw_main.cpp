// Command-line front end: run the classical or semi-supervised procedure on
// user data, drive the simulation harness, or aggregate e-value panels.
// All I/O is CSV/JSON; every report echoes the effective config and seed.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "claw/claw.hpp"

namespace {

using json = nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitInternal = 3;

struct LoadedConfig {
    claw::ClawConfig config;
    claw::NullModel f0 = claw::standard_normal_null();
    std::string f0_kind = "standard_normal";
    std::string f0_file;
    std::string weights_kind = "group";
    bool seed_from_config = false;
};

claw::NullModel load_table_null(const std::string& path) {
    std::ifstream in(path);
    if (!in) claw::raise(claw::ErrorCode::ParseError, "cannot open table null file: " + path);
    const std::vector<claw::CsvRow> rows = claw::read_csv(in);
    std::vector<std::pair<double, double>> knots;
    std::size_t start = 0;
    if (!rows.empty() && !rows[0].empty()) {
        // Tolerate a header row.
        try {
            claw::parse_double(rows[0][0], 1);
        } catch (const claw::Error&) {
            start = 1;
        }
    }
    for (std::size_t r = start; r < rows.size(); ++r) {
        if (rows[r].size() != 2) {
            claw::raise(claw::ErrorCode::ParseError,
                        "table null row " + std::to_string(r + 1) + ": expected 2 columns");
        }
        knots.emplace_back(claw::parse_double(rows[r][0], r + 1),
                           claw::parse_double(rows[r][1], r + 1));
    }
    return claw::table_null(std::move(knots));
}

template <typename T>
T take_field(const json& obj, const std::string& path, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        claw::raise(claw::ErrorCode::InvalidConfig, "bad value at " + path + "." + key);
    }
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::vector<std::string>& known) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const std::string& k : known) {
            if (item.key() == k) {
                ok = true;
                break;
            }
        }
        if (!ok) claw::raise(claw::ErrorCode::InvalidConfig, "unknown field " + path + "." + item.key());
    }
}

LoadedConfig load_config(const std::string& path) {
    LoadedConfig loaded;
    if (path.empty()) return loaded;
    std::ifstream in(path);
    if (!in) claw::raise(claw::ErrorCode::ParseError, "cannot open config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        claw::raise(claw::ErrorCode::ParseError, std::string("config JSON: ") + e.what());
    }
    if (!root.is_object()) claw::raise(claw::ErrorCode::InvalidConfig, "config must be a JSON object");
    reject_unknown_keys(root, "config",
                        {"alpha", "lambda", "epsilon", "clfdr_cap", "density_floor", "bandwidth",
                         "weights", "sidedness", "seed", "train_fraction", "f0"});

    claw::ClawConfig& cfg = loaded.config;
    cfg.alpha = take_field(root, "config", "alpha", cfg.alpha);
    cfg.lambda = take_field(root, "config", "lambda", cfg.lambda);
    cfg.epsilon = take_field(root, "config", "epsilon", cfg.epsilon);
    cfg.clfdr_cap = take_field(root, "config", "clfdr_cap", cfg.clfdr_cap);
    cfg.density_floor = take_field(root, "config", "density_floor", cfg.density_floor);
    cfg.train_fraction = take_field(root, "config", "train_fraction", cfg.train_fraction);
    if (root.contains("seed")) {
        cfg.seed = take_field<std::uint64_t>(root, "config", "seed", 0);
        loaded.seed_from_config = true;
    }

    if (root.contains("bandwidth")) {
        const json& bw = root.at("bandwidth");
        if (!bw.is_object()) claw::raise(claw::ErrorCode::InvalidConfig, "config.bandwidth must be an object");
        reject_unknown_keys(bw, "config.bandwidth", {"rule", "h"});
        const std::string rule = take_field<std::string>(bw, "config.bandwidth", "rule", "silverman");
        if (rule == "silverman") {
            cfg.bandwidth = claw::BandwidthRule::silverman();
        } else if (rule == "fixed") {
            cfg.bandwidth = claw::BandwidthRule::fixed(
                take_field<double>(bw, "config.bandwidth", "h", 0.0));
        } else {
            claw::raise(claw::ErrorCode::InvalidConfig, "config.bandwidth.rule must be silverman|fixed");
        }
    }

    if (root.contains("weights")) {
        const json& w = root.at("weights");
        if (!w.is_object()) claw::raise(claw::ErrorCode::InvalidConfig, "config.weights must be an object");
        reject_unknown_keys(w, "config.weights", {"kind", "scale"});
        const std::string kind = take_field<std::string>(w, "config.weights", "kind", "group");
        if (kind == "group") {
            cfg.weights = claw::WeightSpec::group();
        } else if (kind == "gaussian") {
            cfg.weights = claw::WeightSpec::gaussian(
                take_field<double>(w, "config.weights", "scale", 0.0));
        } else {
            claw::raise(claw::ErrorCode::InvalidConfig, "config.weights.kind must be group|gaussian");
        }
        loaded.weights_kind = kind;
    }

    if (root.contains("sidedness")) {
        const std::string s = take_field<std::string>(root, "config", "sidedness", "two_sided");
        if (s == "two_sided") {
            cfg.sidedness = claw::Sidedness::two_sided;
        } else if (s == "left") {
            cfg.sidedness = claw::Sidedness::left;
        } else if (s == "right") {
            cfg.sidedness = claw::Sidedness::right;
        } else {
            claw::raise(claw::ErrorCode::InvalidConfig, "config.sidedness must be two_sided|left|right");
        }
    }

    if (root.contains("f0")) {
        const json& f0 = root.at("f0");
        if (!f0.is_object()) claw::raise(claw::ErrorCode::InvalidConfig, "config.f0 must be an object");
        reject_unknown_keys(f0, "config.f0", {"kind", "file"});
        const std::string kind = take_field<std::string>(f0, "config.f0", "kind", "standard_normal");
        if (kind == "standard_normal") {
            loaded.f0 = claw::standard_normal_null();
        } else if (kind == "table") {
            loaded.f0_file = take_field<std::string>(f0, "config.f0", "file", "");
            if (loaded.f0_file.empty()) {
                claw::raise(claw::ErrorCode::InvalidConfig, "config.f0.file is required for table");
            }
            loaded.f0 = load_table_null(loaded.f0_file);
        } else {
            claw::raise(claw::ErrorCode::InvalidConfig, "config.f0.kind must be standard_normal|table");
        }
        loaded.f0_kind = kind;
    }
    return loaded;
}

// Seed precedence: flag > CLAW_SEED env > config > default 0.
void apply_seed(claw::ClawConfig& cfg, bool seed_flag_set, std::uint64_t seed_flag,
                bool seed_from_config) {
    if (seed_flag_set) {
        cfg.seed = seed_flag;
        return;
    }
    if (const char* env = std::getenv("CLAW_SEED")) {
        try {
            cfg.seed = std::stoull(env);
            return;
        } catch (const std::exception&) {
            claw::raise(claw::ErrorCode::InvalidConfig, "CLAW_SEED is not an integer");
        }
    }
    if (!seed_from_config) cfg.seed = 0;
}

struct ParsedInput {
    claw::Dataset data;
    std::vector<std::string> covariate_columns;  // "s" or "s1".."sd"
};

ParsedInput read_input_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) claw::raise(claw::ErrorCode::ParseError, "cannot open input file: " + path);
    const std::vector<claw::CsvRow> rows = claw::read_csv(in);
    if (rows.empty()) claw::raise(claw::ErrorCode::EmptyDataset, "input CSV is empty");
    const claw::CsvRow& header = rows.front();

    auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) return c;
        }
        return std::nullopt;
    };
    const auto t_col = column("t");
    const auto cal_col = column("t_cal");
    if (!t_col) claw::raise(claw::ErrorCode::MissingColumn, "input is missing column 't'");
    if (!cal_col) claw::raise(claw::ErrorCode::MissingColumn, "input is missing column 't_cal'");

    ParsedInput parsed;
    std::vector<std::size_t> s_cols;
    bool categorical = false;
    if (auto s = column("s")) {
        categorical = true;
        s_cols.push_back(*s);
        parsed.covariate_columns = {"s"};
    } else {
        for (std::size_t d = 1;; ++d) {
            const auto c = column("s" + std::to_string(d));
            if (!c) break;
            s_cols.push_back(*c);
            parsed.covariate_columns.push_back("s" + std::to_string(d));
        }
        if (s_cols.empty()) {
            claw::raise(claw::ErrorCode::MissingColumn,
                        "input needs a covariate column 's' or columns 's1'..'sd'");
        }
    }

    for (std::size_t r = 1; r < rows.size(); ++r) {
        const claw::CsvRow& row = rows[r];
        if (row.size() != header.size()) {
            claw::raise(claw::ErrorCode::ParseError,
                        "line " + std::to_string(r + 1) + ": expected " +
                            std::to_string(header.size()) + " fields, got " +
                            std::to_string(row.size()));
        }
        claw::TestUnit unit;
        unit.t = claw::parse_double(row[*t_col], r + 1);
        unit.t_cal = claw::parse_double(row[*cal_col], r + 1);
        if (categorical) {
            unit.s = claw::Covariate::category(row[s_cols[0]]);
        } else {
            std::vector<double> coords(s_cols.size());
            for (std::size_t d = 0; d < s_cols.size(); ++d) {
                coords[d] = claw::parse_double(row[s_cols[d]], r + 1);
            }
            unit.s = claw::Covariate::real(std::move(coords));
        }
        parsed.data.units.push_back(std::move(unit));
    }
    return parsed;
}

std::vector<double> read_null_pool_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) claw::raise(claw::ErrorCode::ParseError, "cannot open null pool file: " + path);
    const std::vector<claw::CsvRow> rows = claw::read_csv(in);
    std::vector<double> pool;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 1) {
            claw::raise(claw::ErrorCode::ParseError,
                        "null pool line " + std::to_string(r + 1) + ": expected 1 column");
        }
        if (r == 0) {
            // Tolerate a header line.
            try {
                pool.push_back(claw::parse_double(rows[r][0], r + 1));
            } catch (const claw::Error&) {
            }
            continue;
        }
        pool.push_back(claw::parse_double(rows[r][0], r + 1));
    }
    return pool;
}

json config_echo(const LoadedConfig& loaded) {
    const claw::ClawConfig& cfg = loaded.config;
    json bw;
    if (cfg.bandwidth.kind == claw::BandwidthRule::Kind::silverman) {
        bw = {{"rule", "silverman"}};
    } else {
        bw = {{"rule", "fixed"}, {"h", cfg.bandwidth.h}};
    }
    json weights;
    if (cfg.weights.kind == claw::WeightSpec::Kind::group) {
        weights = {{"kind", "group"}};
    } else {
        weights = {{"kind", "gaussian"}, {"scale", cfg.weights.scale}};
    }
    json f0;
    if (loaded.f0_kind == "table") {
        f0 = {{"kind", "table"}, {"file", loaded.f0_file}};
    } else {
        f0 = {{"kind", "standard_normal"}};
    }
    const char* sided = cfg.sidedness == claw::Sidedness::two_sided
                            ? "two_sided"
                            : (cfg.sidedness == claw::Sidedness::left ? "left" : "right");
    return json{{"alpha", cfg.alpha},
                {"lambda", cfg.lambda},
                {"epsilon", cfg.epsilon},
                {"clfdr_cap", cfg.clfdr_cap},
                {"density_floor", cfg.density_floor},
                {"bandwidth", bw},
                {"weights", weights},
                {"sidedness", sided},
                {"seed", cfg.seed},
                {"train_fraction", cfg.train_fraction},
                {"f0", f0}};
}

double q_at_tau(const claw::DecisionResult& decision) {
    std::size_t mirror_count = 0;
    for (const claw::ScorePair& sp : decision.scores) {
        if (sp.u_tilde < sp.u && sp.u_tilde <= decision.tau) ++mirror_count;
    }
    return (1.0 + static_cast<double>(mirror_count)) /
           static_cast<double>(std::max<std::size_t>(decision.rejected.size(), 1));
}

void write_report(const std::string& prefix, const ParsedInput& input, const claw::ClawRun& run,
                  const LoadedConfig& loaded) {
    const claw::Dataset& data = input.data;
    const std::size_t m = data.size();

    std::ofstream csv(prefix + ".csv");
    claw::CsvRow header{"index", "t"};
    header.insert(header.end(), input.covariate_columns.begin(), input.covariate_columns.end());
    header.insert(header.end(), {"t_cal", "u", "u_tilde", "evalue", "rejected"});
    claw::write_csv_row(csv, header);
    std::vector<bool> rejected(m, false);
    for (std::size_t i : run.decision.rejected) rejected[i] = true;
    for (std::size_t i = 0; i < m; ++i) {
        claw::CsvRow row{std::to_string(i), claw::format_double(data.units[i].t)};
        if (data.units[i].s.is_categorical()) {
            row.push_back(data.units[i].s.label());
        } else {
            for (double c : data.units[i].s.coords()) row.push_back(claw::format_double(c));
        }
        row.push_back(claw::format_double(data.units[i].t_cal));
        row.push_back(claw::format_double(run.decision.scores[i].u));
        row.push_back(claw::format_double(run.decision.scores[i].u_tilde));
        row.push_back(claw::format_double(run.decision.evalues[i]));
        row.push_back(rejected[i] ? "1" : "0");
        claw::write_csv_row(csv, row);
    }

    json report{{"version", claw::kVersion},
                {"m", m},
                {"alpha", run.config.alpha},
                {"seed", run.config.seed},
                {"n_rejected", run.decision.rejected.size()},
                {"rejected", run.decision.rejected},
                {"q_at_tau", q_at_tau(run.decision)},
                {"bandwidth", run.estimator_state.bandwidth},
                {"config", config_echo(loaded)}};
    if (run.decision.tau == claw::kNoThreshold) {
        report["tau"] = nullptr;
    } else {
        report["tau"] = run.decision.tau;
    }
    std::ofstream js(prefix + ".json");
    js << report.dump(2) << '\n';
}

int warn_on_ties(const claw::ClawRun& run) {
    int ties = 0;
    for (const claw::ScorePair& sp : run.decision.scores) {
        if (sp.u == sp.u_tilde) ++ties;
    }
    if (ties > 0) {
        std::cerr << "warning: " << ties
                  << " exact score tie(s); tied units are never rejected\n";
    }
    return ties;
}

int cmd_run(const std::string& input_path, const std::string& config_path,
            const std::string& prefix, bool seed_flag_set, std::uint64_t seed_flag) {
    LoadedConfig loaded = load_config(config_path);
    apply_seed(loaded.config, seed_flag_set, seed_flag, loaded.seed_from_config);
    ParsedInput input = read_input_csv(input_path);
    const claw::ClawRun run = claw::claw_run(input.data, loaded.f0, loaded.config);
    warn_on_ties(run);
    write_report(prefix, input, run, loaded);
    std::cout << "rejected " << run.decision.rejected.size() << " of " << input.data.size()
              << " at alpha=" << loaded.config.alpha << "\n";
    return kExitOk;
}

int cmd_semisup(const std::string& input_path, const std::string& nulls_path,
                const std::string& config_path, const std::string& prefix, bool seed_flag_set,
                std::uint64_t seed_flag) {
    LoadedConfig loaded = load_config(config_path);
    apply_seed(loaded.config, seed_flag_set, seed_flag, loaded.seed_from_config);
    ParsedInput input = read_input_csv(input_path);
    input.data.null_pool = read_null_pool_csv(nulls_path);
    claw::NullSplit split;
    const claw::ClawRun run = claw::semisup_claw_run(input.data, loaded.config, nullptr, &split);
    warn_on_ties(run);
    write_report(prefix, input, run, loaded);
    json manifest{{"version", claw::kVersion},
                  {"seed", loaded.config.seed},
                  {"pool_size", input.data.null_pool->size()},
                  {"calibration_indices", split.calibration_indices},
                  {"n_train1", split.train1.size()},
                  {"n_train2", split.train2.size()}};
    std::ofstream ms(prefix + "_manifest.json");
    ms << manifest.dump(2) << '\n';
    std::cout << "rejected " << run.decision.rejected.size() << " of " << input.data.size()
              << " at alpha=" << loaded.config.alpha << "\n";
    return kExitOk;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

int cmd_simulate(const std::string& family, int setting, const std::string& param,
                 std::size_t reps, double alpha, const std::string& methods_csv,
                 std::uint64_t seed, unsigned workers, const std::string& out_csv,
                 const std::string& out_json, bool full_null, std::size_t null_pool_size) {
    claw::GeneratorSpec spec;
    spec.family = claw::family_from_string(family);
    spec.setting = setting;
    spec.full_null = full_null;
    spec.null_pool_size = null_pool_size;

    std::vector<double> sweep;
    if (param.empty()) {
        if (spec.family == claw::Family::ordinal && setting == 2) {
            spec.param_name = "pi";
            sweep = {0.05, 0.1, 0.15, 0.2};  // default grid; a choice, not a given
        } else {
            claw::raise(claw::ErrorCode::UnknownSetting, "--param name=value is required");
        }
    } else {
        const auto eq = param.find('=');
        if (eq == std::string::npos) {
            claw::raise(claw::ErrorCode::UnknownSetting, "--param must look like name=value");
        }
        spec.param_name = param.substr(0, eq);
        for (const std::string& v : split_list(param.substr(eq + 1))) {
            sweep.push_back(claw::parse_double(v, 0));
        }
        if (sweep.empty()) claw::raise(claw::ErrorCode::UnknownSetting, "--param has no values");
    }

    const std::vector<std::string> methods = split_list(methods_csv);
    claw::ClawConfig config = claw::default_sim_config(spec);
    config.alpha = alpha;

    std::ostringstream csv;
    claw::write_summary_csv_header(csv);
    json all = json::array();
    for (double value : sweep) {
        spec.param_value = value;
        spec.seed = seed;
        const claw::ReplicationSummary summary =
            claw::replicate(spec, methods, reps, seed, workers, config);
        claw::write_summary_csv_rows(csv, summary);
        json js{{"family", family},
                {"setting", setting},
                {"param", summary.spec.param_string()},
                {"alpha", summary.alpha},
                {"n_reps", summary.n_reps},
                {"se_degenerate", summary.se_degenerate},
                {"seed", seed},
                {"methods", json::array()}};
        for (const claw::MethodSummary& ms : summary.methods) {
            js["methods"].push_back(json{{"method", ms.method},
                                         {"fdr", ms.fdr},
                                         {"fdr_se", ms.fdr_se},
                                         {"ap", ms.ap},
                                         {"ap_se", ms.ap_se},
                                         {"mfdr", ms.mfdr}});
            std::cout << ms.method << " " << summary.spec.param_string() << ": fdr="
                      << ms.fdr << " (se " << ms.fdr_se << ") ap=" << ms.ap << " (se "
                      << ms.ap_se << ") mfdr=" << ms.mfdr << "\n";
        }
        all.push_back(std::move(js));
    }

    std::ofstream out(out_csv);
    if (!out) claw::raise(claw::ErrorCode::ParseError, "cannot write " + out_csv);
    out << csv.str();
    if (!out_json.empty()) {
        std::ofstream js(out_json);
        if (!js) claw::raise(claw::ErrorCode::ParseError, "cannot write " + out_json);
        js << all.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_aggregate(const std::string& panel_path, const std::string& weights_csv, double alpha,
                  const std::string& out_json) {
    std::ifstream in(panel_path);
    if (!in) claw::raise(claw::ErrorCode::ParseError, "cannot open panel file: " + panel_path);
    const std::vector<claw::CsvRow> rows = claw::read_csv(in);
    if (rows.empty()) claw::raise(claw::ErrorCode::EmptyInput, "panel CSV is empty");

    std::size_t start = 0;
    {
        bool header = false;
        for (const std::string& cell : rows[0]) {
            try {
                claw::parse_double(cell, 1);
            } catch (const claw::Error&) {
                header = true;
                break;
            }
        }
        if (header) start = 1;
    }
    if (start >= rows.size()) claw::raise(claw::ErrorCode::EmptyInput, "panel has no data rows");

    const std::size_t k_sources = rows[start].size();
    claw::EvaluePanel panel;
    panel.matrix.assign(k_sources, {});
    for (std::size_t r = start; r < rows.size(); ++r) {
        if (rows[r].size() != k_sources) {
            claw::raise(claw::ErrorCode::ParseError,
                        "panel row " + std::to_string(r + 1) + ": expected " +
                            std::to_string(k_sources) + " columns, got " +
                            std::to_string(rows[r].size()));
        }
        for (std::size_t k = 0; k < k_sources; ++k) {
            panel.matrix[k].push_back(claw::parse_double(rows[r][k], r + 1));
        }
    }
    if (weights_csv.empty()) {
        panel.weights.assign(k_sources, 1.0);
    } else {
        for (const std::string& v : split_list(weights_csv)) {
            panel.weights.push_back(claw::parse_double(v, 0));
        }
    }

    const std::vector<double> averaged = claw::aggregate_evalues(panel);
    const claw::IndexSet rejected = claw::ebh(averaged, alpha);
    json out{{"version", claw::kVersion},
             {"alpha", alpha},
             {"m", averaged.size()},
             {"k_sources", k_sources},
             {"weights", panel.weights},
             {"e_bar", averaged},
             {"rejected", rejected}};
    std::ofstream js(out_json);
    if (!js) claw::raise(claw::ErrorCode::ParseError, "cannot write " + out_json);
    js << out.dump(2) << '\n';
    std::cout << "rejected " << rejected.size() << " of " << averaged.size() << " at alpha="
              << alpha << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CLAW: conformalized locally adaptive weighting for FDR control"};
    app.require_subcommand(1);
    app.set_version_flag("--version", claw::kVersion);

    std::string input_path;
    std::string nulls_path;
    std::string config_path;
    std::string prefix = "report";
    std::uint64_t seed_flag = 0;
    bool seed_flag_set = false;

    auto add_seed = [&](CLI::App* cmd) {
        cmd->add_option_function<std::uint64_t>(
               "--seed",
               [&](const std::uint64_t& v) {
                   seed_flag = v;
                   seed_flag_set = true;
               },
               "seed override (flag > CLAW_SEED env > config > 0)");
    };

    CLI::App* run = app.add_subcommand("run", "classical run with a known null distribution");
    run->add_option("--input", input_path, "input CSV with columns t,t_cal and s or s1..sd")
        ->required();
    run->add_option("--config", config_path, "JSON config file");
    run->add_option("--out-prefix", prefix, "output prefix for .csv/.json reports");
    add_seed(run);

    CLI::App* semisup = app.add_subcommand("semisup", "semi-supervised run from a null pool");
    semisup->add_option("--input", input_path, "input CSV with columns t,t_cal and s or s1..sd")
        ->required();
    semisup->add_option("--nulls", nulls_path, "single-column CSV of labeled null statistics")
        ->required();
    semisup->add_option("--config", config_path, "JSON config file");
    semisup->add_option("--out-prefix", prefix, "output prefix for .csv/.json reports");
    add_seed(semisup);

    std::string family = "grouped";
    int setting = 1;
    std::string param;
    std::size_t reps = 200;
    double alpha = 0.05;
    std::string methods = "claw,bh";
    std::uint64_t sim_seed = 0;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::string out_csv = "summary.csv";
    std::string out_json;
    bool full_null = false;
    std::size_t null_pool_size = 0;

    CLI::App* simulate = app.add_subcommand("simulate", "seeded replication study");
    simulate->add_option("--family", family, "grouped|ordinal|spatial2d");
    simulate->add_option("--setting", setting, "setting id 1..3");
    simulate->add_option("--param", param, "swept parameter, e.g. mu=3 or mu=2.5,3,3.5");
    simulate->add_option("--reps", reps, "replications")->check(CLI::PositiveNumber);
    simulate->add_option("--alpha", alpha, "target FDR level");
    simulate->add_option("--methods", methods, "comma list: claw,semisup_claw,oracle_claw,bh,storey_bh,cbh,separate_bh,separate_cbh");
    simulate->add_option("--seed", sim_seed, "master seed");
    simulate->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    simulate->add_option("--out", out_csv, "summary CSV path");
    simulate->add_option("--json", out_json, "optional summary JSON path");
    simulate->add_flag("--full-null", full_null, "force all signal rates to zero");
    simulate->add_option("--null-pool-size", null_pool_size,
                         "labeled null pool size (for semisup_claw)");

    std::string panel_path;
    std::string weights_csv;
    std::string agg_out = "aggregate.json";
    double agg_alpha = 0.05;
    CLI::App* aggregate = app.add_subcommand("aggregate", "average an e-value panel and run e-BH");
    aggregate->add_option("--panel", panel_path, "CSV, one row per hypothesis, one column per source")
        ->required();
    aggregate->add_option("--weights", weights_csv, "comma list of positive source weights");
    aggregate->add_option("--alpha", agg_alpha, "target FDR level");
    aggregate->add_option("--out", agg_out, "output JSON path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(input_path, config_path, prefix, seed_flag_set, seed_flag);
        }
        if (semisup->parsed()) {
            return cmd_semisup(input_path, nulls_path, config_path, prefix, seed_flag_set,
                               seed_flag);
        }
        if (simulate->parsed()) {
            return cmd_simulate(family, setting, param, reps, alpha, methods, sim_seed, workers,
                                out_csv, out_json, full_null, null_pool_size);
        }
        if (aggregate->parsed()) {
            return cmd_aggregate(panel_path, weights_csv, agg_alpha, agg_out);
        }
    } catch (const claw::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == claw::ErrorCode::InternalError ? kExitInternal : kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitOk;
}
