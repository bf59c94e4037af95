#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rangelab {

enum class TestKind { exact, statistical };

/// How the statistic is judged against the threshold.
enum class Criterion {
    p_above,         ///< p_value > threshold
    p_below,         ///< p_value < threshold
    stat_at_most,    ///< statistic <= threshold
    stat_below,      ///< statistic < threshold
};

/// One line of tests.csv.
struct TestRow {
    std::string name;
    TestKind kind = TestKind::exact;
    double statistic = 0;
    double p_value = 1;
    Criterion criterion = Criterion::stat_at_most;
    double threshold = 0;
    std::uint64_t seed = 0;
    std::string params;
    std::string detail;

    bool passed() const;
};

TestRow make_row(std::string name, TestKind kind, double statistic, double p_value, Criterion criterion,
                 double threshold, std::uint64_t seed, std::string params, std::string detail = {});

std::string to_string(TestKind k);
std::string to_string(Criterion c);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

/// Quotes a CSV field when needed.
std::string csv_field(const std::string& s);

/// test,kind,statistic,p_value,criterion,threshold,passed,seed,params,detail
std::string tests_csv(const std::vector<TestRow>& rows);

/// 0 if every row passes, 2 if an exact row fails, else 1.
int exit_code_for(const std::vector<TestRow>& rows);

}  // namespace rangelab
