#include "rangelab/results.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace rangelab {

bool TestRow::passed() const {
    switch (criterion) {
        case Criterion::p_above: return p_value > threshold;
        case Criterion::p_below: return p_value < threshold;
        case Criterion::stat_at_most: return statistic <= threshold;
        case Criterion::stat_below: return statistic < threshold;
    }
    return false;
}

TestRow make_row(std::string name, TestKind kind, double statistic, double p_value, Criterion criterion,
                 double threshold, std::uint64_t seed, std::string params, std::string detail) {
    return {std::move(name), kind, statistic, p_value, criterion, threshold, seed, std::move(params), std::move(detail)};
}

std::string to_string(TestKind k) {
    return k == TestKind::exact ? "exact" : "statistical";
}

std::string to_string(Criterion c) {
    switch (c) {
        case Criterion::p_above: return "p>";
        case Criterion::p_below: return "p<";
        case Criterion::stat_at_most: return "stat<=";
        case Criterion::stat_below: return "stat<";
    }
    return "?";
}

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return {buf, res.ptr};
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::string tests_csv(const std::vector<TestRow>& rows) {
    std::ostringstream os;
    os << "test,kind,statistic,p_value,criterion,threshold,passed,seed,params,detail\n";
    for (const auto& r : rows) {
        os << csv_field(r.name) << ',' << to_string(r.kind) << ',' << format_double(r.statistic) << ','
           << format_double(r.p_value) << ',' << to_string(r.criterion) << ',' << format_double(r.threshold) << ','
           << (r.passed() ? "true" : "false") << ',' << r.seed << ',' << csv_field(r.params) << ','
           << csv_field(r.detail) << '\n';
    }
    return os.str();
}

int exit_code_for(const std::vector<TestRow>& rows) {
    int code = 0;
    for (const auto& r : rows) {
        if (r.passed()) continue;
        if (r.kind == TestKind::exact) return 2;
        code = 1;
    }
    return code;
}

}  // namespace rangelab
