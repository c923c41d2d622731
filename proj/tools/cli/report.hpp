#pragma once

#include "config.hpp"

#include "stabclt/experiments.hpp"
#include "stabclt/stabilization.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace stabclt::cli {

inline constexpr const char* kVersion = STABCLT_VERSION;

/// 17 significant digits with a '.' separator.
[[nodiscard]] std::string format_real(double x);

/// Nondeterministic and provenance fields; kept apart from the payload.
[[nodiscard]] nlohmann::json make_meta(const RunConfig& config, double wall_seconds, const std::string& started_at);

[[nodiscard]] nlohmann::json experiment_payload(const ExperimentReport& report, const ExperimentPlan& plan);
[[nodiscard]] nlohmann::json probe_payload(const StabilizationProbeResult& result, double lambda,
                                           const FunctionalSpec& spec);
[[nodiscard]] nlohmann::json rate_json(const RateFit& fit);

/// One row per (lambda, region).
[[nodiscard]] std::string levels_csv(const ExperimentReport& report, const ExperimentPlan& plan);
/// One row per lambda with the joint discrepancy and the fit that used it.
[[nodiscard]] std::string rate_csv(std::span<const double> lambdas, std::span<const double> discrepancies,
                                   const std::optional<RateFit>& fit);
[[nodiscard]] std::string tail_csv(const StabilizationProbeResult& result);

/// Threshold violations of a finished experiment; empty means the check passed.
[[nodiscard]] std::vector<std::string> check_failures(const ExperimentReport& report, const ExperimentPlan& plan,
                                                      const CheckConfig& check);

/// UTC time as YYYY-MM-DDTHH:MM:SSZ.
[[nodiscard]] std::string utc_timestamp();

} // namespace stabclt::cli
