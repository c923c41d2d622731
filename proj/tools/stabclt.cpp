#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/report.hpp"

#include "stabclt/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace stabclt::cli;

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo checks of multivariate CLTs for stabilizing functionals"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    CommonArgs args;
    std::uint64_t seed = 0;
    std::size_t workers = 0;
    std::string out_dir;
    auto add_common = [&](CLI::App* sub, bool with_check) {
        sub->add_option("--seed", seed, "Seed (overrides config and STABCLT_SEED)");
        sub->add_option("--workers", workers, "Worker threads (overrides config and STABCLT_WORKERS)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out", out_dir, "Output directory (overrides config and STABCLT_OUT)");
        sub->add_flag("--json", args.json, "Print machine-readable JSON on stdout");
        if (with_check) {
            sub->add_flag("--check", args.check, "Exit 1 when a configured threshold is violated");
        }
    };

    std::vector<double> alphas = {0.5, 1.0, 2.0, 3.0, 4.0};
    auto* constants = app.add_subcommand("constants", "Print V_alpha and delta_alpha");
    constants->add_option("alpha", alphas, "Weight exponents");
    constants->add_flag("--json", args.json, "Print JSON");

    std::string config_path;
    double lambda = 0.0;
    std::uint64_t stream = 0;
    auto* sample = app.add_subcommand("sample", "Draw one point configuration as CSV");
    sample->add_option("config", config_path, "Experiment config (JSON)")->required();
    sample->add_option("--lambda", lambda, "Intensity (default: first lambda_grid entry)")->check(CLI::PositiveNumber);
    sample->add_option("--stream", stream, "Replicate stream");
    add_common(sample, false);

    auto* simulate = app.add_subcommand("simulate", "Run the replicate experiment over lambda_grid");
    simulate->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(simulate, true);

    auto* probe = app.add_subcommand("stab-probe", "Estimate the stabilization radius tail");
    probe->add_option("config", config_path, "Experiment config (JSON)")->required();
    add_common(probe, false);

    std::string report_path;
    double noise_floor = 0.0;
    auto* rate = app.add_subcommand("rate", "Refit the discrepancy rate from report.json");
    rate->add_option("report", report_path, "report.json written by simulate")->required();
    rate->add_option("--noise-floor", noise_floor, "Drop discrepancies below this (default 1/sqrt(N))");
    rate->add_flag("--json", args.json, "Print JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kSuccess : kUsage;
    }

    auto fetch = [&](CLI::App* sub) {
        if (sub->count("--seed")) {
            args.overrides.seed = seed;
        }
        if (sub->count("--workers")) {
            args.overrides.workers = workers;
        }
        if (sub->count("--out")) {
            args.overrides.out = out_dir;
        }
    };

    try {
        if (*constants) {
            return cmd_constants(alphas, args.json, std::cout);
        }
        if (*sample) {
            fetch(sample);
            return cmd_sample(config_path, args, sample->count("--lambda") ? std::optional(lambda) : std::nullopt,
                              stream, std::cout, std::cerr);
        }
        if (*simulate) {
            fetch(simulate);
            return cmd_simulate(config_path, args, std::cout, std::cerr);
        }
        if (*probe) {
            fetch(probe);
            return cmd_stab_probe(config_path, args, std::cout, std::cerr);
        }
        if (*rate) {
            return cmd_rate(report_path, rate->count("--noise-floor") ? std::optional(noise_floor) : std::nullopt,
                            args.json, std::cout, std::cerr);
        }
    } catch (const UsageError& e) {
        std::cerr << "stabclt: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "stabclt: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}
