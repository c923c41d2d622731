#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <sstream>

namespace stabclt::cli {

using nlohmann::json;

namespace {

json real(double x) {
    // nlohmann writes non-finite values as null anyway; be explicit.
    return std::isfinite(x) ? json(x) : json(nullptr);
}

json optional_real(const std::optional<double>& x) { return x ? real(*x) : json(nullptr); }

json matrix(const std::vector<std::vector<double>>& m) {
    json out = json::array();
    for (const auto& row : m) {
        json r = json::array();
        for (double v : row) {
            r.push_back(real(v));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::string csv_cell(const std::optional<double>& x) { return x ? format_real(*x) : std::string(); }

} // namespace

std::string format_real(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_meta(const RunConfig& config, double wall_seconds, const std::string& started_at) {
    return json{{"version", kVersion},
                {"config_hash", config.hash()},
                {"seed", config.seed},
                {"started_at", started_at},
                {"wall_clock_seconds", wall_seconds},
                {"config", config.document}};
}

json rate_json(const RateFit& fit) {
    return json{{"slope", real(fit.slope)},
                {"intercept", real(fit.intercept)},
                {"r_squared", real(fit.r_squared)},
                {"lambdas", fit.lambdas},
                {"warnings", fit.warnings}};
}

json experiment_payload(const ExperimentReport& report, const ExperimentPlan& plan) {
    json levels = json::array();
    for (std::size_t l = 0; l < report.levels.size(); ++l) {
        const auto& level = report.levels[l];
        const auto& s = level.summary;
        json components = json::array();
        for (std::size_t i = 0; i < s.components(); ++i) {
            components.push_back(json{{"region", i},
                                      {"mean", real(s.mean[i])},
                                      {"se_mean", real(s.se_mean[i])},
                                      {"scaled_mean", real(s.scaled_mean[i])},
                                      {"se_scaled_mean", real(s.se_scaled_mean[i])},
                                      {"variance", real(s.variance[i])},
                                      {"se_variance", real(s.se_variance[i])},
                                      {"scaled_variance", real(s.scaled_variance[i])},
                                      {"se_scaled_variance", real(s.se_scaled_variance[i])},
                                      {"target_mean", optional_real(level.target_mean[i])},
                                      {"target_variance", optional_real(level.target_variance[i])},
                                      {"ks", real(level.ks[i])}});
        }
        levels.push_back(json{{"lambda", plan.lambda_grid[l]},
                              {"replicates", s.count},
                              {"components", std::move(components)},
                              {"covariance", matrix(s.covariance)},
                              {"correlation", matrix(s.correlation())},
                              {"joint_discrepancy", real(level.joint.sup)},
                              {"joint_argmax", level.joint.argmax},
                              {"warnings", level.warnings}});
    }
    return json{{"levels", std::move(levels)},
                {"rate_fit", report.rate ? rate_json(*report.rate) : json(nullptr)},
                {"warnings", report.warnings}};
}

json probe_payload(const StabilizationProbeResult& result, double lambda, const FunctionalSpec& spec) {
    json tail = json::array();
    for (std::size_t g = 0; g < result.t_grid.size(); ++g) {
        tail.push_back(json{{"t", real(result.t_grid[g])},
                            {"tail_prob", real(result.tail_probs[g])},
                            {"censored", result.censored_counts[g]}});
    }
    std::size_t censored = 0;
    for (bool c : result.censored) {
        censored += c ? 1 : 0;
    }
    return json{{"lambda", lambda},
                {"family", std::string(to_string(spec.family))},
                {"k", spec.k},
                {"alpha", spec.alpha.value()},
                {"probe_count", result.radii.size()},
                {"censored_probes", censored},
                {"decay_slope", real(result.decay_slope)},
                {"r_squared", real(result.r_squared)},
                {"fitted_points", result.fitted_points},
                {"radii", result.radii},
                {"tail", std::move(tail)}};
}

std::string levels_csv(const ExperimentReport& report, const ExperimentPlan& plan) {
    const std::size_t m = plan.test_functions.size();
    std::ostringstream out;
    out << "lambda,region,mean,se_mean,scaled_mean,var,se_var,scaled_var,target_mean,target_var,ks,joint_discrepancy";
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            out << ",corr_" << i << '_' << j;
        }
    }
    out << '\n';
    for (std::size_t l = 0; l < report.levels.size(); ++l) {
        const auto& level = report.levels[l];
        const auto& s = level.summary;
        const auto corr = s.correlation();
        for (std::size_t r = 0; r < m; ++r) {
            out << format_real(plan.lambda_grid[l]) << ',' << r << ',' << format_real(s.mean[r]) << ','
                << format_real(s.se_mean[r]) << ',' << format_real(s.scaled_mean[r]) << ','
                << format_real(s.variance[r]) << ',' << format_real(s.se_variance[r]) << ','
                << format_real(s.scaled_variance[r]) << ',' << csv_cell(level.target_mean[r]) << ','
                << csv_cell(level.target_variance[r]) << ',' << format_real(level.ks[r]) << ','
                << format_real(level.joint.sup);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = i + 1; j < m; ++j) {
                    out << ',' << format_real(corr[i][j]);
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

std::string rate_csv(std::span<const double> lambdas, std::span<const double> discrepancies,
                     const std::optional<RateFit>& fit) {
    std::ostringstream out;
    out << "lambda,joint_discrepancy,in_fit,slope,intercept,r_squared\n";
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        bool used = false;
        if (fit) {
            for (double l : fit->lambdas) {
                used = used || l == lambdas[i];
            }
        }
        out << format_real(lambdas[i]) << ',' << format_real(discrepancies[i]) << ',' << (used ? 1 : 0) << ','
            << (fit ? format_real(fit->slope) : "") << ',' << (fit ? format_real(fit->intercept) : "") << ','
            << (fit ? format_real(fit->r_squared) : "") << '\n';
    }
    return out.str();
}

std::string tail_csv(const StabilizationProbeResult& result) {
    std::ostringstream out;
    out << "t,tail_prob,censored\n";
    for (std::size_t g = 0; g < result.t_grid.size(); ++g) {
        out << format_real(result.t_grid[g]) << ',' << format_real(result.tail_probs[g]) << ','
            << result.censored_counts[g] << '\n';
    }
    return out.str();
}

std::vector<std::string> check_failures(const ExperimentReport& report, const ExperimentPlan& plan,
                                        const CheckConfig& check) {
    std::vector<std::string> failures;
    char buf[256];
    for (std::size_t l = 0; l < report.levels.size(); ++l) {
        const auto& level = report.levels[l];
        const auto& s = level.summary;
        const double lambda = plan.lambda_grid[l];
        for (std::size_t i = 0; i < s.components(); ++i) {
            if (level.target_mean[i]) {
                const double gap = std::fabs(s.scaled_mean[i] - *level.target_mean[i]);
                if (!(gap <= std::max(check.sigmas * s.se_scaled_mean[i], check.mean_abs_tolerance))) {
                    std::snprintf(buf, sizeof buf, "lambda=%g region %zu: scaled mean %.6g vs target %.6g (%.2f SE)",
                                  lambda, i, s.scaled_mean[i], *level.target_mean[i], gap / s.se_scaled_mean[i]);
                    failures.emplace_back(buf);
                }
            }
            if (level.target_variance[i]) {
                const double gap = std::fabs(s.scaled_variance[i] - *level.target_variance[i]);
                if (!(gap <= std::max(check.sigmas * s.se_scaled_variance[i], check.variance_abs_tolerance))) {
                    std::snprintf(buf, sizeof buf,
                                  "lambda=%g region %zu: scaled variance %.6g vs target %.6g (%.2f SE)", lambda, i,
                                  s.scaled_variance[i], *level.target_variance[i], gap / s.se_scaled_variance[i]);
                    failures.emplace_back(buf);
                }
            }
        }
        if (check.max_joint_discrepancy && !(level.joint.sup <= *check.max_joint_discrepancy)) {
            std::snprintf(buf, sizeof buf, "lambda=%g: joint discrepancy %.6g exceeds %.6g", lambda, level.joint.sup,
                          *check.max_joint_discrepancy);
            failures.emplace_back(buf);
        }
        if (check.max_abs_correlation) {
            const auto corr = s.correlation();
            for (std::size_t i = 0; i < corr.size(); ++i) {
                for (std::size_t j = i + 1; j < corr.size(); ++j) {
                    if (!(std::fabs(corr[i][j]) <= *check.max_abs_correlation)) {
                        std::snprintf(buf, sizeof buf, "lambda=%g: |corr(%zu,%zu)| = %.6g exceeds %.6g", lambda, i,
                                      j, std::fabs(corr[i][j]), *check.max_abs_correlation);
                        failures.emplace_back(buf);
                    }
                }
            }
        }
    }
    if (check.rate_band) {
        if (!report.rate) {
            failures.emplace_back("rate band requested but no rate fit was possible");
        } else if (!(report.rate->slope >= check.rate_band->first && report.rate->slope <= check.rate_band->second)) {
            std::snprintf(buf, sizeof buf, "rate slope %.6g outside [%g, %g]", report.rate->slope,
                          check.rate_band->first, check.rate_band->second);
            failures.emplace_back(buf);
        }
    }
    return failures;
}

} // namespace stabclt::cli
