#pragma once

#include "stabclt/experiments.hpp"
#include "stabclt/stabilization.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stabclt::cli {

/// Malformed command line or config; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CheckConfig {
    /// Allowed distance from a theoretical target, in estimated standard errors.
    double sigmas = 3.0;
    /// Absolute slack on top of the SE band; finite-lambda bias does not shrink with N.
    double mean_abs_tolerance = 0.0;
    double variance_abs_tolerance = 0.0;
    std::optional<double> max_joint_discrepancy;
    std::optional<double> max_abs_correlation;
    std::optional<std::pair<double, double>> rate_band;
};

struct OutputConfig {
    std::optional<std::string> dir;
    bool json = true;
    bool csv = true;
};

struct ProbeConfig {
    std::optional<double> lambda;
    ProbeOptions options;
};

/// Values supplied on the command line; they win over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> workers;
    std::optional<std::string> out;
};

struct RunConfig {
    /// The document as read, with the effective seed written back.
    nlohmann::json document;
    std::string source_name;

    DensitySpec density = DensitySpec::homogeneous(Region::interval(0.0, 1.0));
    std::vector<TestFunctionSpec> test_functions;
    FunctionalSpec functional;
    ProcessKind process = ProcessKind::poisson;
    std::vector<double> lambda_grid;
    std::optional<std::size_t> replicates;
    std::vector<double> t_grid = default_t_grid();
    std::size_t grid_budget = kDefaultGridBudget;

    std::uint64_t seed = 0;
    std::size_t workers = 1;
    std::string out_dir = ".";

    ProbeConfig probe;
    CheckConfig check;
    OutputConfig output;

    /// Experiment plan for `simulate`; throws UsageError naming any missing key.
    [[nodiscard]] ExperimentPlan plan() const;
    /// FNV-1a 64 of the canonical config, without the keys that cannot change results.
    [[nodiscard]] std::string hash() const;
};

/// Parses `text` as a config. Precedence is overrides, then the file, then
/// STABCLT_SEED / STABCLT_WORKERS / STABCLT_OUT.
[[nodiscard]] RunConfig parse_config(const std::string& text, const std::string& source_name,
                                     const Overrides& overrides = {});
[[nodiscard]] RunConfig load_config(const std::string& path, const Overrides& overrides = {});

[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Reads a whole file; throws UsageError when it cannot be opened.
[[nodiscard]] std::string read_file(const std::string& path);

} // namespace stabclt::cli
