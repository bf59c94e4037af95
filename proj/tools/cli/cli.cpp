#include "cli.hpp"

#include "rangelab/analysis.hpp"
#include "rangelab/ensemble.hpp"
#include "rangelab/errors.hpp"
#include "rangelab/results.hpp"
#include "rangelab/rng.hpp"
#include "rangelab/samplers.hpp"
#include "rangelab/suites.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#ifndef RANGELAB_VERSION
#define RANGELAB_VERSION "unknown"
#endif

namespace rangelab::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// configuration

const std::string& RunConfig::raw(const std::string& key) const {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing key '" + key + "'");
    return it->second;
}

std::uint64_t RunConfig::get_u64(const std::string& key) const {
    const auto& v = raw(key);
    std::uint64_t out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
        throw ConfigError("key '" + key + "' expects a nonnegative integer, got '" + v + "'");
    }
    return out;
}

namespace {

double parse_double(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
        throw ConfigError("key '" + key + "' expects a real number, got '" + v + "'");
    }
    return x;
}

}  // namespace

double RunConfig::get_double(const std::string& key) const {
    return parse_double(key, raw(key));
}

bool RunConfig::get_bool(const std::string& key) const {
    const auto& v = raw(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

std::vector<double> RunConfig::get_list(const std::string& key) const {
    const auto& v = raw(key);
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        const auto stop = std::min(v.find('/', start), v.size());
        out.push_back(parse_double(key, v.substr(start, stop - start)));
        start = stop + 1;
    }
    return out;
}

std::string RunConfig::manifest() const {
    std::ostringstream os;
    os << "tool=rangelab\nversion=" << RANGELAB_VERSION << "\ncommand=" << command << "\npreset="
       << (preset.empty() ? "none" : preset) << "\nout=" << out_dir << '\n';
    for (const auto& [k, v] : values) os << k << '=' << v << '\n';
    return os.str();
}

namespace {

const Settings kCommon{{"seed", "2024"}, {"shards", "8"}, {"workers", "0"}};
const Settings kGamma{{"weights", "0.5/0.5"},     {"epsilons", "0.1/0.05/0.02/0.01"}, {"mc_samples", "100000"},
                      {"gamma_tol", "1e-9"},      {"eps_samples", "100000"},          {"ratio_trees", "100000"}};
const Settings kVerify{{"scale", "1"}, {"fault", "none"}};
const Settings kWalk{{"epsilon", "0.02"}, {"weights", "0.5/0.5"}, {"x_cut", "12"},
                     {"replicates", "4000"}, {"times", "0.2/0.5"}, {"walk_tol", "1e-4"}};
const Settings kLimit{{"gamma", "auto"}, {"mc_samples", "100000"}, {"gamma_tol", "1e-9"},
                      {"grid_dt", "1e-4"}, {"limit_paths", "4000"}};
const Settings kSimulate{{"store_trees", "false"}};

void merge(Settings& into, const Settings& from) {
    for (const auto& [k, v] : from) into[k] = v;
}

}  // namespace

Settings defaults_for(const std::string& command) {
    Settings s = kCommon;
    if (command == "gamma") {
        merge(s, kGamma);
    } else if (command == "verify") {
        merge(s, kVerify);
    } else if (command == "limit") {
        merge(s, kWalk);
        merge(s, kLimit);
    } else if (command == "simulate") {
        merge(s, kWalk);
        merge(s, kSimulate);
    } else if (command == "report-data") {
        merge(s, kGamma);
        merge(s, kVerify);
        merge(s, kWalk);
        merge(s, kLimit);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    return s;
}

Settings preset_values(const std::string& command, const std::string& preset) {
    if (preset.empty()) return {};
    Settings all;
    if (preset == "smoke") {
        all = {{"mc_samples", "2000"},  {"eps_samples", "2000"},  {"ratio_trees", "2000"},
               {"scale", "0.02"},       {"replicates", "200"},    {"limit_paths", "200"},
               {"epsilon", "0.05"},     {"grid_dt", "1e-3"}};
    } else if (preset == "acceptance") {
        all = {{"seed", "2024"},        {"mc_samples", "100000"}, {"eps_samples", "100000"},
               {"ratio_trees", "100000"}, {"epsilons", "0.1/0.05/0.02/0.01"}, {"gamma_tol", "1e-9"},
               {"scale", "1"},          {"epsilon", "0.02"},      {"weights", "0.5/0.5"},
               {"x_cut", "12"},         {"times", "0.2/0.5"},     {"replicates", "4000"},
               {"limit_paths", "4000"}, {"walk_tol", "1e-4"},     {"grid_dt", "1e-4"},
               {"gamma", "auto"}};
    } else {
        throw ConfigError("unknown preset '" + preset + "' (expected smoke or acceptance)");
    }
    // keep only the keys this command understands
    const auto known = defaults_for(command);
    Settings out;
    for (const auto& [k, v] : all) {
        if (known.count(k)) out[k] = v;
    }
    return out;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + text + "'");
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    auto key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + text + "'");
    return {key, trim(text.substr(eq + 1))};
}

Settings read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    Settings s;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto [k, v] = parse_assignment(line);
            s[k] = v;
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return s;
}

RunConfig resolve(const std::string& command, const std::string& preset, const std::string& config_path,
                  const std::vector<std::string>& sets, const Settings& flags, const std::string& out_dir) {
    RunConfig cfg;
    cfg.command = command;
    cfg.preset = preset;
    cfg.out_dir = out_dir;
    cfg.values = defaults_for(command);
    auto apply = [&](const Settings& layer, const std::string& origin) {
        for (const auto& [k, v] : layer) {
            if (!cfg.values.count(k)) {
                throw ConfigError("unknown key '" + k + "' for command " + command + " (from " + origin + ")");
            }
            cfg.values[k] = v;
        }
    };
    apply(preset_values(command, preset), "preset");
    if (!config_path.empty()) {
        // a manifest is a valid config file: its header lines are skipped
        auto file = read_config_file(config_path);
        for (const char* k : {"tool", "version", "command", "preset", "out"}) file.erase(k);
        std::erase_if(file, [](const auto& kv) { return kv.first.rfind("resolved.", 0) == 0; });
        apply(file, config_path);
    }
    Settings overrides;
    for (const auto& s : sets) {
        auto [k, v] = parse_assignment(s);
        overrides[k] = v;
    }
    apply(overrides, "--set");
    apply(flags, "command line");
    return cfg;
}

// ---------------------------------------------------------------------------
// output helpers

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path prepare_out(const RunConfig& cfg, const Settings& resolved = {}) {
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    auto manifest = cfg.manifest();
    for (const auto& [k, v] : resolved) manifest += "resolved." + k + "=" + v + '\n';
    write_file(dir / "manifest.txt", manifest);
    return dir;
}

std::vector<double> weights_of(const RunConfig& cfg) {
    const auto w = cfg.get_list("weights");
    validate_weights(w);
    return w;
}

std::string weights_label(const std::vector<double>& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) out += (i ? "/" : "") + format_double(w[i]);
    return out;
}

bool is_uniform(const std::vector<double>& w) {
    return std::all_of(w.begin(), w.end(), [&](double x) { return x == w.front(); });
}

void summarize(const std::vector<TestRow>& rows, std::ostream& log) {
    std::size_t failed = 0;
    for (const auto& r : rows) {
        log << (r.passed() ? "PASS " : "FAIL ") << r.name << " statistic=" << format_double(r.statistic)
            << " p=" << format_double(r.p_value) << '\n';
        failed += !r.passed();
    }
    log << rows.size() - failed << "/" << rows.size() << " rows pass\n";
}

std::string gamma_csv(const RunConfig& cfg) {
    const auto w = weights_of(cfg);
    const auto seed = cfg.get_u64("seed");
    const auto label = weights_label(w);
    std::ostringstream os;
    os << kGammaCsvHeader << '\n';
    auto row = [&](const std::string& eps, const char* estimator, const GammaEstimate& g, std::uint64_t s) {
        os << label << ',' << eps << ',' << estimator << ',' << format_double(g.value) << ','
           << format_double(g.std_error) << ',' << format_double(g.truncation_bound) << ',' << g.n_samples << ','
           << s << '\n';
    };
    {
        const auto s = derive_seed(seed, 1);
        Rng rng(s);
        row("limit", "inv_gamma_mc", inv_gamma_mc(w, cfg.get_u64("mc_samples"), cfg.get_double("gamma_tol"), rng), s);
    }
    const auto eps = cfg.get_list("epsilons");
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const auto p = ModelParams::make(eps[i], w);
        const auto e = format_double(eps[i]);
        if (is_uniform(w)) {
            row(e, "inv_gamma_eps_series", inv_gamma_eps_uniform(w.size(), eps[i]), 0);
        } else {
            const auto s = derive_seed(seed, 100 + i);
            Rng rng(s);
            row(e, "inv_gamma_eps_mc", inv_gamma_eps(w, eps[i], cfg.get_u64("eps_samples"), rng), s);
        }
        const auto s = derive_seed(seed, 200 + i);
        Rng rng(s);
        row(e, "distinct_ratio", distinct_ratio_estimate(p, cfg.get_u64("ratio_trees"), rng), s);
    }
    return os.str();
}

VerifyConfig verify_config(const RunConfig& cfg) {
    VerifyConfig v;
    v.seed = cfg.get_u64("seed");
    v.scale = cfg.get_double("scale");
    v.shards = cfg.get_u64("shards");
    v.workers = cfg.get_u64("workers");
    v.fault = parse_fault(cfg.raw("fault"));
    v.validate();
    return v;
}

EnsembleConfig ensemble_config(const RunConfig& cfg) {
    EnsembleConfig e;
    e.params = ModelParams::make(cfg.get_double("epsilon"), weights_of(cfg));
    e.x_cut = cfg.get_double("x_cut");
    e.n_replicates = cfg.get_u64("replicates");
    e.seed = cfg.get_u64("seed");
    e.shards = cfg.get_u64("shards");
    e.workers = cfg.get_u64("workers");
    e.observation_times = cfg.get_list("times");
    e.tol = cfg.get_double("walk_tol");
    if (cfg.values.count("store_trees")) e.store_trees = cfg.get_bool("store_trees");
    e.validate();
    return e;
}

double resolve_gamma(const RunConfig& cfg, const EnsembleConfig& e) {
    if (cfg.raw("gamma") != "auto") {
        const double g = cfg.get_double("gamma");
        if (!(g > 0.0)) throw ConfigError("gamma must be positive");
        return g;
    }
    Rng rng(derive_seed(e.seed, 1));
    const auto inv = inv_gamma_mc(e.params.weights, cfg.get_u64("mc_samples"), cfg.get_double("gamma_tol"), rng);
    return 1.0 / inv.value;
}

struct LimitRun {
    std::string marginals;
    std::vector<TestRow> rows;
    double gamma = 0;
};

LimitRun run_limit(const RunConfig& cfg, std::ostream& log) {
    const auto e_cfg = ensemble_config(cfg);
    LimitRun out;
    out.gamma = resolve_gamma(cfg, e_cfg);
    log << "simulating " << e_cfg.n_replicates << " replicates at epsilon=" << format_double(e_cfg.params.epsilon)
        << ", gamma=" << format_double(out.gamma) << '\n';
    const auto ensemble = simulate_ensemble(e_cfg);
    const auto lim = sample_limit_marginals(e_cfg, out.gamma, cfg.get_double("grid_dt"), cfg.get_u64("limit_paths"));
    out.marginals = marginals_csv(ensemble, lim);
    out.rows = theorem1_marginal_test(ensemble, lim);
    for (auto& r : lemma34_marginal_test(ensemble, lim)) out.rows.push_back(std::move(r));
    for (auto& r : ensemble_identity_rows(ensemble, lim)) out.rows.push_back(std::move(r));
    return out;
}

std::string replicates_csv(const Ensemble& e) {
    std::ostringstream os;
    os << "replicate,seed,steps,cut_time,size_tau,size_tau_tilde,distinct,total,failed_identities\n";
    for (const auto& r : e.records) {
        os << r.replicate << ',' << r.seed << ',' << r.steps << ',' << r.cut_time << ',' << r.size_tau << ','
           << r.size_tilde << ',' << r.distinct << ',' << r.total << ',';
        bool first = true;
        for (std::size_t k = 0; k < identity_names().size(); ++k) {
            if (!(r.failed_identities & (1u << k))) continue;
            os << (first ? "" : ";") << identity_names()[k];
            first = false;
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// commands

int cmd_gamma(const RunConfig& cfg, std::ostream& log) {
    const auto csv = gamma_csv(cfg);
    const auto dir = prepare_out(cfg);
    write_file(dir / "gamma.csv", csv);
    log << csv;
    return kPass;
}

int cmd_verify(const RunConfig& cfg, std::ostream& log) {
    const auto v = verify_config(cfg);
    const auto dir = prepare_out(cfg);
    const auto rows = run_verify(v);
    write_file(dir / "tests.csv", tests_csv(rows));
    summarize(rows, log);
    return exit_code_for(rows);
}

int cmd_limit(const RunConfig& cfg, std::ostream& log) {
    ensemble_config(cfg);  // validate before touching the output directory
    auto run = run_limit(cfg, log);
    const auto dir = prepare_out(cfg, {{"gamma", format_double(run.gamma)}});
    write_file(dir / "marginals.csv", run.marginals);
    write_file(dir / "tests.csv", tests_csv(run.rows));
    summarize(run.rows, log);
    return exit_code_for(run.rows);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
    const auto e_cfg = ensemble_config(cfg);
    const auto dir = prepare_out(cfg);
    const auto e = simulate_ensemble(e_cfg);
    write_file(dir / "ensemble.jsonl", e.to_jsonl());
    write_file(dir / "replicates.csv", replicates_csv(e));
    log << "wrote " << e.records.size() << " replicates to " << dir.string() << '\n';
    return kPass;
}

int cmd_report_data(const RunConfig& cfg, std::ostream& log) {
    ensemble_config(cfg);
    verify_config(cfg);
    const auto gamma = gamma_csv(cfg);
    auto rows = run_verify(verify_config(cfg));
    auto run = run_limit(cfg, log);
    for (auto& r : run.rows) rows.push_back(std::move(r));
    const auto dir = prepare_out(cfg, {{"gamma", format_double(run.gamma)}});
    write_file(dir / "gamma.csv", gamma);
    write_file(dir / "marginals.csv", run.marginals);
    write_file(dir / "tests.csv", tests_csv(rows));
    summarize(rows, log);
    return exit_code_for(rows);
}

int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err) {
    try {
        if (cfg.command == "gamma") return cmd_gamma(cfg, log);
        if (cfg.command == "verify") return cmd_verify(cfg, log);
        if (cfg.command == "limit") return cmd_limit(cfg, log);
        if (cfg.command == "simulate") return cmd_simulate(cfg, log);
        if (cfg.command == "report-data") return cmd_report_data(cfg, log);
        throw ConfigError("unknown command '" + cfg.command + "'");
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const InvalidParams& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
}

int run(int argc, char** argv, std::ostream& log, std::ostream& err) {
    CLI::App app{"Range trees of biased walks on the Ulam-Harris tree: estimators, checks and limit runs", "rangelab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(RANGELAB_VERSION));

    std::string out_dir = "out", config_path, preset, fault;
    std::vector<std::string> sets;
    std::uint64_t seed = 0, shards = 0, workers = 0;
    const std::vector<std::pair<std::string, std::string>> descriptions{
        {"gamma", "1/gamma and 1/gamma_eps estimates over an epsilon grid (gamma.csv)"},
        {"verify", "exact and statistical property suites (tests.csv)"},
        {"limit", "ensemble marginals against the limit law (marginals.csv, tests.csv)"},
        {"simulate", "per-replicate ensemble records (ensemble.jsonl, replicates.csv)"},
        {"report-data", "gamma, verify and limit outputs in one directory for the report"},
    };
    for (const auto& [name, help] : descriptions) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--config", config_path, "flat key=value file");
        sub->add_option("--set", sets, "key=value override (repeatable)");
        sub->add_option("--preset", preset, "smoke or acceptance")->check(CLI::IsMember({"smoke", "acceptance"}));
        sub->add_option("--seed", seed, "master seed");
        sub->add_option("--shards", shards, "number of shards");
        sub->add_option("--workers", workers, "worker threads (0: hardware concurrency)");
        if (name == "verify" || name == "report-data") {
            sub->add_option("--inject-fault", fault, "deliberate defect for mutation testing: height-off-by-one");
        }
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, r;
        const int code = app.exit(e, o, r);
        log << o.str();
        err << r.str();
        return code == 0 ? kPass : kConfigError;
    }
    const auto* chosen = app.get_subcommands().front();
    Settings flags;
    if (chosen->count("--seed")) flags["seed"] = std::to_string(seed);
    if (chosen->count("--shards")) flags["shards"] = std::to_string(shards);
    if (chosen->count("--workers")) flags["workers"] = std::to_string(workers);
    if (chosen->get_option_no_throw("--inject-fault") && chosen->count("--inject-fault")) flags["fault"] = fault;
    RunConfig cfg;
    try {
        cfg = resolve(chosen->get_name(), preset, config_path, sets, flags, out_dir);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kConfigError;
    }
    return execute(cfg, log, err);
}

}  // namespace rangelab::cli
