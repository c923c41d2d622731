#include "stabclt/experiments.hpp"

#include "stabclt/errors.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

namespace stabclt {

namespace {

constexpr std::uint32_t kMaxRetries = 3;

// Integral of kappa^power over gamma, skipping boxes where kappa vanishes.
double kappa_power_integral(const DensitySpec& density, const Region& gamma, double power) {
    const auto& boxes = density.support().boxes();
    const auto& weights = density.weights();
    double total = 0.0;
    for (std::size_t b = 0; b < boxes.size(); ++b) {
        if (weights[b] > 0.0) {
            total += std::pow(weights[b], power) * gamma.intersection_volume(boxes[b]);
        }
    }
    return total;
}

} // namespace

std::string_view to_string(ProcessKind kind) noexcept {
    return kind == ProcessKind::poisson ? "poisson" : "binomial";
}

ProcessKind parse_process(std::string_view name) {
    if (name == "poisson") {
        return ProcessKind::poisson;
    }
    if (name == "binomial") {
        return ProcessKind::binomial;
    }
    throw ConfigurationError("unknown process '" + std::string(name) + "' (expected poisson or binomial)");
}

void ExperimentPlan::validate() const {
    functional.validate();
    if (test_functions.empty()) {
        throw ConfigurationError("plan: at least one region is required");
    }
    for (const auto& f : test_functions) {
        if (f.region().dimension() != density.dimension()) {
            throw ConfigurationError("plan: region dimension does not match the density");
        }
    }
    require_disjoint(test_functions);
    if (replicates < 2) {
        throw ConfigurationError("plan: at least two replicates are required");
    }
    if (lambda_grid.empty()) {
        throw ConfigurationError("plan: lambda_grid is empty");
    }
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
        if (!(lambda_grid[i] > 0.0) || !std::isfinite(lambda_grid[i])) {
            throw ConfigurationError("plan: lambda values must be positive and finite");
        }
        if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) {
            throw ConfigurationError("plan: lambda_grid must be strictly increasing");
        }
    }
    if (t_grid.empty()) {
        throw ConfigurationError("plan: t_grid is empty");
    }
}

std::uint64_t level_seed(std::uint64_t seed, double lambda) noexcept {
    return mix64(seed ^ mix64(std::bit_cast<std::uint64_t>(lambda)));
}

PointConfiguration sample_replicate(const ExperimentPlan& plan, double lambda, StreamId stream) {
    const std::uint64_t seed = level_seed(plan.seed, lambda);
    if (plan.process == ProcessKind::poisson) {
        return sample_poisson(plan.density, lambda, seed, stream);
    }
    const auto n = static_cast<std::size_t>(std::llround(lambda * plan.density.integral()));
    return sample_binomial(plan.density, n, seed, stream);
}

std::vector<StatVector> run_replicates(const ExperimentPlan& plan, double lambda, std::size_t workers) {
    plan.validate();
    FunctionalSpec spec = plan.functional;
    spec.lambda = lambda;
    spec.validate();

    const std::size_t n = plan.replicates;
    std::vector<StatVector> out(n);
    std::vector<std::exception_ptr> errors(n);

    auto run_one = [&](std::size_t r) {
        try {
            for (std::uint32_t attempt = 0;; ++attempt) {
                const PointConfiguration config = sample_replicate(plan, lambda, StreamId{r, attempt});
                try {
                    out[r] = t_vector(config, plan.test_functions, spec);
                    return;
                } catch (const InsufficientPointsError& e) {
                    if (attempt == kMaxRetries) {
                        std::ostringstream msg;
                        msg << "replicate " << r << " at lambda=" << lambda << " had too few points after "
                            << kMaxRetries << " retries: " << e.what();
                        throw Error(msg.str());
                    }
                }
            }
        } catch (...) {
            errors[r] = std::current_exception();
        }
    };

    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t r = 0; r < n; ++r) {
            run_one(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t r = next.fetch_add(1); r < n; r = next.fetch_add(1)) {
                    run_one(r);
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

void attach_targets(const ExperimentPlan& plan, LevelReport& level) {
    const std::size_t m = plan.test_functions.size();
    level.target_mean.assign(m, std::nullopt);
    level.target_variance.assign(m, std::nullopt);
    if (plan.density.dimension() != 1 || plan.functional.family != Family::nn_directed) {
        return;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const auto& f = plan.test_functions[i];
        if (f.kind() != TestFunctionSpec::Kind::indicator) {
            continue;
        }
        // Local intensity lambda*kappa rescales NN distances by kappa^{-1/d}, so the
        // limits weight kappa by the powers below; with kappa == 1 both reduce to |Gamma|.
        const double a = plan.functional.alpha.value();
        const double mean_mass = kappa_power_integral(plan.density, f.region(), 1.0 - a);
        const double var_mass = kappa_power_integral(plan.density, f.region(), 1.0 - 2.0 * a);
        level.target_mean[i] = limiting_mean(plan.functional.alpha, mean_mass);
        if (plan.process == ProcessKind::poisson) {
            const double excess = delta_alpha(plan.functional.alpha) * mean_mass;
            level.target_variance[i] = v_alpha(plan.functional.alpha) * var_mass + excess * excess;
        }
    }
}

LevelReport summarise_level(const ExperimentPlan& plan, std::span<const StatVector> samples) {
    LevelReport level;
    level.summary = estimate_moments(samples);
    const std::size_t m = level.summary.components();
    try {
        const auto z = standardize(samples, level.summary);
        for (std::size_t i = 0; i < m; ++i) {
            level.ks.push_back(ks_to_normal(component(z, i)));
        }
        level.joint = product_form_discrepancy(z, plan.t_grid, plan.grid_budget);
    } catch (const DegenerateComponentError& e) {
        level.ks.assign(m, std::nan(""));
        level.joint.sup = std::nan("");
        level.joint.argmax.assign(m, std::nan(""));
        level.warnings.emplace_back(e.what());
    }
    attach_targets(plan, level);
    return level;
}

ExperimentReport run_experiment(const ExperimentPlan& plan, std::size_t workers, const LevelCallback& on_level) {
    plan.validate();
    ExperimentReport report;
    std::vector<double> lambdas, discrepancies;
    for (double lambda : plan.lambda_grid) {
        const auto samples = run_replicates(plan, lambda, workers);
        report.levels.push_back(summarise_level(plan, samples));
        if (on_level) {
            on_level(lambda, report.levels.back());
        }
        if (std::isfinite(report.levels.back().joint.sup)) {
            lambdas.push_back(lambda);
            discrepancies.push_back(report.levels.back().joint.sup);
        }
    }
    if (plan.lambda_grid.size() >= 3) {
        const double floor = 1.0 / std::sqrt(static_cast<double>(plan.replicates));
        try {
            report.rate = fit_rate(lambdas, discrepancies, floor);
            report.warnings.insert(report.warnings.end(), report.rate->warnings.begin(), report.rate->warnings.end());
        } catch (const DomainError& e) {
            report.warnings.emplace_back(std::string("rate fit skipped: ") + e.what());
        }
    }
    return report;
}

ExperimentPlan theorem42_plan(WeightExponent alpha, std::span<const double> kappa, std::span<const Box> intervals,
                              std::vector<double> lambda_grid, std::size_t replicates, std::uint64_t seed) {
    if (kappa.size() != intervals.size() || intervals.empty()) {
        throw ConfigurationError("theorem42: need one positive intensity per interval");
    }
    std::vector<TestFunctionSpec> fs;
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (intervals[i].dimension() != 1) {
            throw ConfigurationError("theorem42: intervals must be one-dimensional");
        }
        if (!(kappa[i] > 0.0)) {
            throw ConfigurationError("theorem42: intensities must be positive");
        }
        fs.push_back(TestFunctionSpec::indicator(Region({intervals[i]})));
    }
    DensitySpec density = DensitySpec::intensity(Region(std::vector<Box>(intervals.begin(), intervals.end())),
                                                 std::vector<double>(kappa.begin(), kappa.end()));
    ExperimentPlan plan{
        .density = std::move(density),
        .test_functions = std::move(fs),
        .functional = FunctionalSpec{Family::nn_directed, 1, alpha, 1.0},
        .process = ProcessKind::poisson,
        .lambda_grid = std::move(lambda_grid),
        .replicates = replicates,
        .seed = seed,
    };
    plan.validate();
    return plan;
}

ExperimentReport theorem42_experiment(WeightExponent alpha, std::span<const double> kappa,
                                      std::span<const Box> intervals, std::vector<double> lambda_grid,
                                      std::size_t replicates, std::uint64_t seed, std::size_t workers) {
    return run_experiment(theorem42_plan(alpha, kappa, intervals, std::move(lambda_grid), replicates, seed),
                          workers);
}

} // namespace stabclt
