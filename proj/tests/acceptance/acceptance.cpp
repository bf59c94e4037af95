// Acceptance run: one PASS/FAIL line per primary criterion, pinned seeds.
// Usage: rangelab_acceptance [work_dir]

#include "cli.hpp"

#include "rangelab/analysis.hpp"
#include "rangelab/results.hpp"
#include "rangelab/suites.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using namespace rangelab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct RowView {
    bool passed = false;
    std::string statistic, p_value;
};

using RowMap = std::map<std::string, RowView>;

RowMap index_rows(const std::vector<TestRow>& rows) {
    RowMap out;
    for (const auto& r : rows) out[r.name] = {r.passed(), format_double(r.statistic), format_double(r.p_value)};
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

RowMap read_tests_csv(const fs::path& p) {
    std::ifstream in(p);
    RowMap out;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
        const auto f = split_csv_line(line);
        if (f.size() < 7) continue;
        out[f[0]] = {f[6] == "true", f[2], f[3]};
    }
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class Report {
public:
    // Every listed row must exist and pass; failing rows are named in the detail.
    bool rows_pass(const RowMap& rows, const std::vector<std::string>& names, std::ostringstream& detail) {
        bool ok = true;
        for (const auto& n : names) {
            const auto it = rows.find(n);
            if (it == rows.end()) {
                detail << " missing:" << n;
                ok = false;
            } else if (!it->second.passed) {
                detail << " failed:" << n << "(stat=" << it->second.statistic << ",p=" << it->second.p_value << ")";
                ok = false;
            }
        }
        return ok;
    }

    void line(const std::string& id, bool ok, const std::string& detail) {
        std::cout << (ok ? "PASS " : "FAIL ") << id << " :" << detail << std::endl;
        all_ok_ = all_ok_ && ok;
        ++count_;
        passed_ += ok;
    }

    bool all_ok() const { return all_ok_; }
    int count() const { return count_; }
    int passed() const { return passed_; }

private:
    bool all_ok_ = true;
    int count_ = 0;
    int passed_ = 0;
};

std::vector<std::string> with_times(const std::string& base) { return {base + "_s0.2", base + "_s0.5"}; }

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
    fs::create_directories(work);

    VerifyConfig vc;  // seed 2024, scale 1
    Report report;

    auto run_timed = [&](const std::vector<std::string>& suites, double& secs) {
        const auto t0 = Clock::now();
        auto rows = index_rows(run_suites(vc, suites));
        secs = seconds_since(t0);
        return rows;
    };
    auto budget = [](std::ostringstream& d, double secs, double limit) {
        d << " runtime=" << secs << "s (budget " << limit << "s)";
        return secs < limit;
    };

    {
        double secs = 0;
        const auto rows = run_timed({"gamma"}, secs);
        std::ostringstream d;
        bool ok = report.rows_pass(rows, {"gamma_mc_b2", "gamma_mc_b5"}, d);
        ok = budget(d, secs, 10.0) && ok;
        report.line("gamma_value_uniform_weights", ok, d.str());

        std::ostringstream d2;
        bool ok2 = report.rows_pass(rows, {"gamma_eps_gap_decreasing", "gamma_eps_gap_at_0.01",
                                           "gamma_eps_vs_distinct_ratio"}, d2);
        const auto t0 = Clock::now();
        for (double eps : {0.1, 0.05, 0.02, 0.01}) d2 << " eps=" << eps << ":" << inv_gamma_eps_uniform(2, eps).value;
        ok2 = budget(d2, seconds_since(t0), 5.0) && ok2;
        report.line("gamma_eps_converges_to_gamma", ok2, d2.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"event_A"}, secs);
        std::ostringstream d;
        bool ok = report.rows_pass(rows, {"event_A_exact_rational", "event_A_mc_left", "event_A_mc_right",
                                          "event_A_asymmetry", "event_A_symmetric_at_half"}, d);
        ok = budget(d, secs, 120.0) && ok;
        report.line("example_event_probabilities", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"genfun_closed"}, secs);
        std::ostringstream d;
        bool ok = report.rows_pass(rows, {"genfun_closed_form"}, d);
        ok = budget(d, secs, 5.0) && ok;
        report.line("generating_function_closed_form", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"genfun_conditional"}, secs);
        std::ostringstream d;
        const bool ok = report.rows_pass(rows, {"genfun_conditional_pgf"}, d);
        report.line("conditional_generating_function", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"encoding"}, secs);
        std::ostringstream d;
        bool ok = report.rows_pass(rows, registered_suites().front().rows, d);
        ok = budget(d, secs, 30.0) && ok;
        report.line("encoding_suite", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"law_decoded", "law_shuffle"}, secs);
        std::ostringstream d;
        const bool ok = report.rows_pass(rows, {"law_decoded", "law_decoded_aa", "law_decoded_ab_epsilon",
                                                "law_shuffle", "law_shuffle_aa", "law_shuffle_ab_epsilon"}, d);
        for (const char* extra : {"law_decoded_ab_dispatch", "law_shuffle_ab_dispatch"}) {
            d << " " << extra << ".p=" << rows.at(extra).p_value;
        }
        report.line("walk_tree_shape_laws", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"track"}, secs);
        std::ostringstream d;
        std::vector<std::string> names;
        for (const auto& s : registered_suites()) {
            if (s.name == "track") names = s.rows;
        }
        const bool ok = report.rows_pass(rows, names, d);
        report.line("track_identities", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"escape"}, secs);
        std::ostringstream d;
        const bool ok = report.rows_pass(rows, {"escape_probability_dp"}, d);
        d << " dp_gap=" << rows.at("escape_probability_dp").statistic;
        report.line("escape_probability", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"fn"}, secs);
        std::ostringstream d;
        const bool ok = report.rows_pass(rows, {"fn_closed_vs_iterate", "fn_power_limit"}, d);
        d << " |power - limit|=" << rows.at("fn_power_limit").statistic;
        report.line("iterated_pgf_limit", ok, d.str());
    }
    {
        double secs = 0;
        const auto rows = run_timed({"sizebias"}, secs);
        std::ostringstream d;
        const bool ok = report.rows_pass(
            rows, {"sizebias_height0", "sizebias_height1", "sizebias_height3", "sizebias_cut_size5"}, d);
        report.line("size_biased_identity", ok, d.str());
    }

    // limit runs through the command-line driver, acceptance preset
    auto limit_run = [&](const std::string& name, const cli::Settings& flags, double& secs) {
        const auto out = work / name;
        fs::remove_all(out);
        const auto cfg = cli::resolve("limit", "acceptance", "", {}, flags, out.string());
        std::ostringstream log, err;
        const auto t0 = Clock::now();
        const int rc = cli::execute(cfg, log, err);
        secs = seconds_since(t0);
        if (rc == cli::kConfigError || rc == cli::kRuntimeError) std::cerr << err.str();
        return rc;
    };
    double secs_a = 0, secs_b = 0, secs_c = 0;
    const int rc_a = limit_run("limit_a", {{"shards", "8"}}, secs_a);
    {
        const auto rows = read_tests_csv(work / "limit_a" / "tests.csv");
        std::ostringstream d;
        bool ok = rc_a != cli::kConfigError && rc_a != cli::kRuntimeError;
        std::vector<std::string> names;
        for (const char* base : {"limit_contour_left", "limit_height_left", "limit_negative_control_no_time_change",
                                 "limit_unshrunk_contour_left", "limit_unshrunk_contour_right", "limit_contour_right",
                                 "limit_height_right"}) {
            for (const auto& n : with_times(base)) names.push_back(n);
        }
        ok = report.rows_pass(rows, names, d) && ok;
        ok = budget(d, secs_a, 600.0) && ok;
        report.line("range_tree_limit_desk_scale", ok, d.str());
    }
    limit_run("limit_b", {{"shards", "8"}}, secs_b);
    limit_run("limit_c", {{"shards", "3"}}, secs_c);
    {
        std::ostringstream d;
        bool ok = true;
        for (const char* f : {"marginals.csv", "tests.csv"}) {
            const auto a = slurp(work / "limit_a" / f);
            const bool same = !a.empty() && a == slurp(work / "limit_b" / f);
            d << " rerun:" << f << (same ? "=identical" : "=DIFFERENT");
            ok = ok && same;
        }
        const auto ta = slurp(work / "limit_a" / "tests.csv");
        const bool merged = !ta.empty() && ta == slurp(work / "limit_c" / "tests.csv");
        d << " shards8_vs_3:tests.csv" << (merged ? "=identical" : "=DIFFERENT");
        report.line("limit_run_determinism", ok && merged, d.str());
    }

    std::cout << report.passed() << "/" << report.count() << " criteria pass" << std::endl;
    return report.all_ok() ? 0 : 1;
}
