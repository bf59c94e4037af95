#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rangelab::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kPass = 0,
    kStatisticalFailure = 1,
    kExactFailure = 2,
    kConfigError = 3,
    kRuntimeError = 4,
};

/// Bad key, bad value, unreadable config file.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Settings = std::map<std::string, std::string>;

/// Fully resolved configuration of one run: defaults, then preset, then the
/// config file, then --set overrides, then dedicated flags.
struct RunConfig {
    std::string command;
    std::string preset;
    std::string out_dir = "out";
    Settings values;

    const std::string& raw(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;
    double get_double(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// Slash-separated list, e.g. "0.2/0.5".
    std::vector<double> get_list(const std::string& key) const;

    /// manifest.txt: tool, version, command, preset, out, then every key in
    /// sorted order.
    std::string manifest() const;
};

/// Keys accepted by a command, with their defaults.
Settings defaults_for(const std::string& command);
/// Values a preset ("smoke" or "acceptance") sets for a command.
Settings preset_values(const std::string& command, const std::string& preset);

/// Reads a flat key=value file; '#' starts a comment, blank lines are skipped.
Settings read_config_file(const std::string& path);
/// Parses one "key=value" override.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// Applies the layers in order; unknown keys are a ConfigError.
RunConfig resolve(const std::string& command, const std::string& preset, const std::string& config_path,
                  const std::vector<std::string>& sets, const Settings& flags, const std::string& out_dir);

int cmd_gamma(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_limit(const RunConfig& cfg, std::ostream& log);
int cmd_simulate(const RunConfig& cfg, std::ostream& log);
int cmd_report_data(const RunConfig& cfg, std::ostream& log);

/// Dispatches on the resolved command; maps errors to exit codes.
int execute(const RunConfig& cfg, std::ostream& log, std::ostream& err);

/// Full command line entry point.
int run(int argc, char** argv, std::ostream& log, std::ostream& err);

/// gamma CSV header.
inline constexpr const char* kGammaCsvHeader =
    "weights,epsilon,estimator,value,std_error,truncation_bound,n_samples,seed";

}  // namespace rangelab::cli
