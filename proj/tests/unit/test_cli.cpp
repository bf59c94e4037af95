#include "cli.hpp"

#include "rangelab/suites.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

using namespace rangelab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("rangelab_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_cli(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "rangelab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream log, err;
    const int rc = run(static_cast<int>(argv.size()), argv.data(), log, err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Config, LayersApplyInOrder) {
    const auto dir = scratch("layers");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "run.cfg");
        f << "# comment\nseed = 5\nmc_samples=300\n\neps_samples=400 # trailing\n";
    }
    const auto cfg = resolve("gamma", "smoke", (dir / "run.cfg").string(), {"mc_samples=700"}, {{"seed", "9"}}, "x");
    EXPECT_EQ(cfg.raw("seed"), "9");
    EXPECT_EQ(cfg.get_u64("mc_samples"), 700u);
    EXPECT_EQ(cfg.get_u64("eps_samples"), 400u);
    EXPECT_EQ(cfg.get_u64("ratio_trees"), 2000u);  // from the preset
    EXPECT_EQ(cfg.get_list("epsilons"), (std::vector<double>{0.1, 0.05, 0.02, 0.01}));
}

TEST(Config, Errors) {
    EXPECT_THROW(resolve("gamma", "", "", {"bogus=1"}, {}, "x"), ConfigError);
    EXPECT_THROW(resolve("gamma", "", "", {"noequals"}, {}, "x"), ConfigError);
    EXPECT_THROW(resolve("gamma", "fast", "", {}, {}, "x"), ConfigError);
    EXPECT_THROW(resolve("gamma", "", "/nonexistent/file.cfg", {}, {}, "x"), ConfigError);
    EXPECT_THROW(resolve("nope", "", "", {}, {}, "x"), ConfigError);
    const auto cfg = resolve("gamma", "", "", {"seed=-3", "gamma_tol=abc"}, {}, "x");
    EXPECT_THROW(cfg.get_u64("seed"), ConfigError);
    EXPECT_THROW(cfg.get_double("gamma_tol"), ConfigError);
    EXPECT_THROW(cfg.raw("missing"), ConfigError);
}

TEST(Config, PresetsOnlyTouchKnownKeys) {
    for (const char* cmd : {"gamma", "verify", "limit", "simulate", "report-data"}) {
        for (const char* preset : {"smoke", "acceptance"}) {
            EXPECT_NO_THROW(resolve(cmd, preset, "", {}, {}, "x")) << cmd << " " << preset;
        }
    }
    const auto acc = resolve("limit", "acceptance", "", {}, {}, "x");
    EXPECT_EQ(acc.raw("epsilon"), "0.02");
    EXPECT_EQ(acc.raw("replicates"), "4000");
    EXPECT_EQ(acc.raw("grid_dt"), "1e-4");
}

TEST(Cli, ExitCodesForBadInput) {
    const auto dir = scratch("bad");
    std::string err;
    EXPECT_EQ(run_cli({"gamma", "--out", dir.string(), "--set", "weights=0.5/0.6"}, &err), kConfigError);
    EXPECT_NE(err.find("weights"), std::string::npos);
    EXPECT_EQ(run_cli({"gamma", "--out", dir.string(), "--set", "unknown=1"}), kConfigError);
    EXPECT_EQ(run_cli({"gamma", "--preset", "huge"}), kConfigError);
    EXPECT_EQ(run_cli({"nosuchcommand"}), kConfigError);
    EXPECT_EQ(run_cli({}), kConfigError);
    EXPECT_EQ(run_cli({"gamma", "--inject-fault", "height-off-by-one"}), kConfigError);
    EXPECT_EQ(run_cli({"verify", "--inject-fault", "other"}), kConfigError);
    EXPECT_EQ(run_cli({"--help"}), kPass);
}

TEST(Cli, VerifyWritesOneRowPerRegisteredCheck) {
    const auto dir = scratch("verify");
    const int rc = run_cli({"verify", "--preset", "smoke", "--out", dir.string()});
    EXPECT_NE(rc, kConfigError);
    EXPECT_NE(rc, kRuntimeError);
    const auto rows = lines_of(dir / "tests.csv");
    ASSERT_FALSE(rows.empty());
    EXPECT_EQ(rows.front(), "test,kind,statistic,p_value,criterion,threshold,passed,seed,params,detail");
    EXPECT_EQ(rows.size() - 1, rangelab::registered_row_count());
    const auto manifest = slurp(dir / "manifest.txt");
    EXPECT_NE(manifest.find("command=verify"), std::string::npos);
    EXPECT_NE(manifest.find("preset=smoke"), std::string::npos);
    EXPECT_NE(manifest.find("seed=2024"), std::string::npos);
}

TEST(Cli, InjectedFaultIsDetected) {
    const auto dir = scratch("fault");
    EXPECT_EQ(run_cli({"verify", "--preset", "smoke", "--inject-fault", "height-off-by-one", "--out", dir.string()}),
              kExactFailure);
    bool hl_failed = false;
    for (const auto& line : lines_of(dir / "tests.csv")) {
        if (line.rfind("encoding_hl,", 0) == 0) hl_failed = line.find(",false,") != std::string::npos;
    }
    EXPECT_TRUE(hl_failed);
}

TEST(Cli, ManifestReplaysRun) {
    const auto a = scratch("replay_a");
    const auto b = scratch("replay_b");
    ASSERT_EQ(run_cli({"gamma", "--preset", "smoke", "--seed", "17", "--set", "epsilons=0.1/0.05", "--out", a.string()}),
              kPass);
    ASSERT_EQ(run_cli({"gamma", "--config", (a / "manifest.txt").string(), "--out", b.string()}), kPass);
    EXPECT_EQ(slurp(a / "gamma.csv"), slurp(b / "gamma.csv"));
}

TEST(Cli, GammaCsv) {
    const auto dir = scratch("gamma");
    EXPECT_EQ(run_cli({"gamma", "--preset", "smoke", "--out", dir.string()}), kPass);
    const auto rows = lines_of(dir / "gamma.csv");
    ASSERT_GE(rows.size(), 2u);
    EXPECT_EQ(rows.front(), kGammaCsvHeader);
    std::set<std::string> estimators;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string field;
        for (int k = 0; k < 3; ++k) std::getline(ss, field, ',');
        estimators.insert(field);
    }
    EXPECT_EQ(estimators, (std::set<std::string>{"inv_gamma_mc", "inv_gamma_eps_series", "distinct_ratio"}));
}

TEST(Cli, LimitWritesMarginalsFromFourSources) {
    const auto dir = scratch("limit");
    const int rc = run_cli({"limit", "--preset", "smoke", "--set", "replicates=60", "--set", "limit_paths=60", "--out",
                            dir.string()});
    EXPECT_TRUE(rc == kPass || rc == kStatisticalFailure || rc == kExactFailure);
    std::set<std::string> sources;
    const auto rows = lines_of(dir / "marginals.csv");
    ASSERT_GT(rows.size(), 1u);
    EXPECT_EQ(rows.front(), "s,value,source,series");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::stringstream ss(rows[i]);
        std::string field;
        for (int k = 0; k < 3; ++k) std::getline(ss, field, ',');
        sources.insert(field);
    }
    EXPECT_EQ(sources, (std::set<std::string>{"tau", "tau_tilde", "limit", "limit_gamma"}));
    EXPECT_NE(slurp(dir / "manifest.txt").find("resolved.gamma="), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "tests.csv"));
}

TEST(Cli, SimulateWritesRecords) {
    const auto dir = scratch("simulate");
    EXPECT_EQ(run_cli({"simulate", "--preset", "smoke", "--set", "replicates=10", "--out", dir.string()}), kPass);
    EXPECT_EQ(lines_of(dir / "ensemble.jsonl").size(), 10u);
    const auto rows = lines_of(dir / "replicates.csv");
    ASSERT_EQ(rows.size(), 11u);
    EXPECT_EQ(rows.front(), "replicate,seed,steps,cut_time,size_tau,size_tau_tilde,distinct,total,failed_identities");
}

TEST(Cli, ReportDataBundlesEveryTable) {
    const auto dir = scratch("report");
    const int rc = run_cli({"report-data", "--preset", "smoke", "--set", "replicates=40", "--set", "limit_paths=40",
                            "--out", dir.string()});
    EXPECT_NE(rc, kConfigError);
    EXPECT_NE(rc, kRuntimeError);
    for (const char* f : {"gamma.csv", "marginals.csv", "tests.csv", "manifest.txt"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
}
