#include "commands.hpp"

#include "report.hpp"

#include "stabclt/errors.hpp"
#include "stabclt/special_fn.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>

namespace stabclt::cli {

using nlohmann::json;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) {
        throw Error("cannot write '" + path.string() + "'");
    }
    file << text;
    if (!file) {
        throw Error("write to '" + path.string() + "' failed");
    }
}

std::filesystem::path prepare_dir(const std::string& dir) {
    std::filesystem::path p(dir);
    std::error_code ec;
    std::filesystem::create_directories(p, ec);
    if (ec) {
        throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

} // namespace

int cmd_constants(const std::vector<double>& alphas, bool as_json, std::ostream& out) {
    for (double a : alphas) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw UsageError("constants: alpha must be positive, got " + format_real(a));
        }
    }
    json rows = json::array();
    char buf[256];
    if (!as_json) {
        std::snprintf(buf, sizeof buf, "%-8s %-22s %-22s %-22s %-22s\n", "alpha", "V_alpha", "delta_alpha",
                      "delta_alpha^2", "2^-a*Gamma(1+a)");
        out << buf;
    }
    for (double a : alphas) {
        const WeightExponent alpha{a};
        const double v = v_alpha(alpha);
        const double d = delta_alpha(alpha);
        const double m = exp_moment(a);
        if (as_json) {
            rows.push_back(json{{"alpha", a}, {"v_alpha", v}, {"delta_alpha", d}, {"delta_alpha_sq", d * d},
                                {"mean_coeff", m}});
        } else {
            std::snprintf(buf, sizeof buf, "%-8g %-22.15g %-22.15g %-22.15g %-22.15g\n", a, v, d, d * d, m);
            out << buf;
        }
    }
    if (as_json) {
        out << rows.dump(2) << '\n';
    }
    return kSuccess;
}

int cmd_sample(const std::string& config_path, const CommonArgs& args, std::optional<double> lambda,
               std::uint64_t stream, std::ostream& out, std::ostream& log) {
    const RunConfig config = load_config(config_path, args.overrides);
    if (!lambda) {
        if (config.lambda_grid.empty()) {
            throw UsageError("sample: give --lambda or a lambda_grid in the config");
        }
        lambda = config.lambda_grid.front();
    }
    if (!(*lambda > 0.0) || !std::isfinite(*lambda)) {
        throw UsageError("sample: lambda must be positive");
    }
    // Same stream layout as simulate, so --stream r reproduces replicate r.
    ExperimentPlan plan{config.density, {}, config.functional, config.process, {*lambda}, 2, config.seed};
    const PointConfiguration points = sample_replicate(plan, *lambda, StreamId{stream, 0});

    const std::size_t d = points.dimension();
    if (args.json) {
        json coords = json::array();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto p = points.point(i);
            coords.push_back(std::vector<double>(p.begin(), p.end()));
        }
        json doc{{"meta", make_meta(config, 0.0, utc_timestamp())},
                 {"payload", {{"lambda", *lambda}, {"stream", stream}, {"points", std::move(coords)}}}};
        out << doc.dump(2) << '\n';
        return kSuccess;
    }
    std::string csv;
    for (std::size_t j = 0; j < d; ++j) {
        csv += (j ? ",x" : "x") + std::to_string(j);
    }
    csv += '\n';
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto p = points.point(i);
        for (std::size_t j = 0; j < d; ++j) {
            csv += (j ? "," : "") + format_real(p[j]);
        }
        csv += '\n';
    }
    if (args.overrides.out) {
        const auto path = prepare_dir(config.out_dir) / "points.csv";
        write_text(path, csv);
        log << "wrote " << points.size() << " points to " << path.string() << '\n';
    } else {
        out << csv;
    }
    return kSuccess;
}

int cmd_simulate(const std::string& config_path, const CommonArgs& args, std::ostream& out, std::ostream& log) {
    const RunConfig config = load_config(config_path, args.overrides);
    const ExperimentPlan plan = config.plan();
    const std::string started_at = utc_timestamp();
    const auto start = std::chrono::steady_clock::now();

    const auto report = run_experiment(plan, config.workers, [&](double lambda, const LevelReport& level) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "lambda=%-10g N=%zu joint=%.4f %.1fs", lambda, level.summary.count,
                      level.joint.sup, seconds_since(start));
        log << buf << '\n';
    });

    json doc{{"meta", make_meta(config, seconds_since(start), started_at)},
             {"payload", experiment_payload(report, plan)}};
    std::vector<std::string> failures;
    if (args.check) {
        failures = check_failures(report, plan, config.check);
        doc["check"] = json{{"passed", failures.empty()}, {"failures", failures}};
    }

    if (config.output.json || config.output.csv) {
        const auto dir = prepare_dir(config.out_dir);
        if (config.output.json) {
            write_text(dir / "report.json", doc.dump(2) + "\n");
        }
        if (config.output.csv) {
            write_text(dir / "levels.csv", levels_csv(report, plan));
            std::vector<double> discrepancies;
            for (const auto& level : report.levels) {
                discrepancies.push_back(level.joint.sup);
            }
            write_text(dir / "rate.csv", rate_csv(plan.lambda_grid, discrepancies, report.rate));
        }
        log << "wrote report to " << dir.string() << '\n';
    }

    if (args.json) {
        out << doc.dump(2) << '\n';
    } else {
        for (std::size_t l = 0; l < report.levels.size(); ++l) {
            const auto& s = report.levels[l].summary;
            for (std::size_t i = 0; i < s.components(); ++i) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "lambda=%g region=%zu scaled_mean=%.6g (se %.2g) scaled_var=%.6g (se %.2g)",
                              plan.lambda_grid[l], i, s.scaled_mean[i], s.se_scaled_mean[i], s.scaled_variance[i],
                              s.se_scaled_variance[i]);
                out << buf;
                if (report.levels[l].target_mean[i]) {
                    std::snprintf(buf, sizeof buf, " target_mean=%.6g", *report.levels[l].target_mean[i]);
                    out << buf;
                }
                if (report.levels[l].target_variance[i]) {
                    std::snprintf(buf, sizeof buf, " target_var=%.6g", *report.levels[l].target_variance[i]);
                    out << buf;
                }
                out << '\n';
            }
        }
        if (report.rate) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "rate slope=%.4f r2=%.3f over %zu levels\n", report.rate->slope,
                          report.rate->r_squared, report.rate->lambdas.size());
            out << buf;
        }
        for (const auto& w : report.warnings) {
            log << "warning: " << w << '\n';
        }
    }
    for (const auto& f : failures) {
        log << "check failed: " << f << '\n';
    }
    return failures.empty() ? kSuccess : kFailure;
}

int cmd_stab_probe(const std::string& config_path, const CommonArgs& args, std::ostream& out, std::ostream& log) {
    const RunConfig config = load_config(config_path, args.overrides);
    double lambda = 0.0;
    if (config.probe.lambda) {
        lambda = *config.probe.lambda;
    } else if (!config.lambda_grid.empty()) {
        lambda = config.lambda_grid.front();
    } else {
        throw UsageError("stab-probe: config needs probe.lambda or a lambda_grid");
    }
    FunctionalSpec spec = config.functional;
    spec.lambda = lambda;
    const std::string started_at = utc_timestamp();
    const auto start = std::chrono::steady_clock::now();
    const auto result = stabilization_probe(config.density, lambda, spec, config.probe.options, config.seed);

    const json doc{{"meta", make_meta(config, seconds_since(start), started_at)},
                   {"payload", probe_payload(result, lambda, spec)}};
    if (config.output.json || config.output.csv) {
        const auto dir = prepare_dir(config.out_dir);
        if (config.output.json) {
            write_text(dir / "probe.json", doc.dump(2) + "\n");
        }
        if (config.output.csv) {
            write_text(dir / "tail.csv", tail_csv(result));
        }
        log << "wrote probe report to " << dir.string() << '\n';
    }
    if (args.json) {
        out << doc.dump(2) << '\n';
    } else {
        out << tail_csv(result);
        char buf[160];
        std::snprintf(buf, sizeof buf, "decay_slope=%.6g r_squared=%.4f fitted_points=%zu\n", result.decay_slope,
                      result.r_squared, result.fitted_points);
        out << buf;
    }
    return kSuccess;
}

int cmd_rate(const std::string& report_path, std::optional<double> noise_floor, bool as_json, std::ostream& out,
             std::ostream& log) {
    const std::string text = read_file(report_path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(report_path + ": malformed JSON (" + e.what() + ")");
    }
    std::vector<double> lambdas, discrepancies;
    std::size_t replicates = 0;
    try {
        for (const auto& level : doc.at("payload").at("levels")) {
            const auto& d = level.at("joint_discrepancy");
            if (d.is_null()) {
                continue;
            }
            lambdas.push_back(level.at("lambda").get<double>());
            discrepancies.push_back(d.get<double>());
            const auto n = level.at("replicates").get<std::size_t>();
            replicates = replicates == 0 ? n : std::min(replicates, n);
        }
    } catch (const json::exception& e) {
        throw UsageError(report_path + ": not a simulate report (" + e.what() + ")");
    }
    const double floor = noise_floor ? *noise_floor : (replicates > 0 ? 1.0 / std::sqrt(double(replicates)) : 0.0);
    const RateFit fit = fit_rate(lambdas, discrepancies, floor);
    for (const auto& w : fit.warnings) {
        log << "warning: " << w << '\n';
    }
    if (as_json) {
        json result = rate_json(fit);
        result["noise_floor"] = floor;
        out << result.dump(2) << '\n';
    } else {
        out << rate_csv(lambdas, discrepancies, fit);
    }
    return kSuccess;
}

} // namespace stabclt::cli
