#pragma once

#include "config.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stabclt::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

struct CommonArgs {
    Overrides overrides;
    bool json = false;
    bool check = false;
};

int cmd_constants(const std::vector<double>& alphas, bool json, std::ostream& out);

/// Prints (or writes points.csv) one configuration at `lambda`, or at the
/// first grid intensity when none is given.
int cmd_sample(const std::string& config_path, const CommonArgs& args, std::optional<double> lambda,
               std::uint64_t stream, std::ostream& out, std::ostream& log);

/// Runs the experiment, writes report.json, levels.csv and rate.csv.
int cmd_simulate(const std::string& config_path, const CommonArgs& args, std::ostream& out, std::ostream& log);

int cmd_stab_probe(const std::string& config_path, const CommonArgs& args, std::ostream& out, std::ostream& log);

/// Refits the discrepancy rate from an existing report.json.
int cmd_rate(const std::string& report_path, std::optional<double> noise_floor, bool json, std::ostream& out,
             std::ostream& log);

} // namespace stabclt::cli
