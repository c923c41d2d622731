#pragma once

#include "stabclt/functionals.hpp"
#include "stabclt/point_process.hpp"
#include "stabclt/statistics.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace stabclt {

enum class ProcessKind {
    poisson,
    /// Fixed number round(lambda * integral of the density) of i.i.d. points.
    binomial,
};

[[nodiscard]] std::string_view to_string(ProcessKind kind) noexcept;
[[nodiscard]] ProcessKind parse_process(std::string_view name);

struct ExperimentPlan {
    DensitySpec density;
    /// One test function per region; regions must be pairwise disjoint.
    std::vector<TestFunctionSpec> test_functions;
    FunctionalSpec functional;
    ProcessKind process = ProcessKind::poisson;
    std::vector<double> lambda_grid;
    std::size_t replicates = 2;
    std::uint64_t seed = 0;
    std::vector<double> t_grid = default_t_grid();
    std::size_t grid_budget = kDefaultGridBudget;

    void validate() const;
};

/// Seed used for every replicate at one grid intensity.
[[nodiscard]] std::uint64_t level_seed(std::uint64_t seed, double lambda) noexcept;

/// The point process of `plan` at intensity lambda for one replicate stream.
[[nodiscard]] PointConfiguration sample_replicate(const ExperimentPlan& plan, double lambda, StreamId stream);

/// N statistic vectors; replicate r draws from stream r (substreams 1..3 on
/// retry after InsufficientPointsError). The output does not depend on `workers`.
[[nodiscard]] std::vector<StatVector> run_replicates(const ExperimentPlan& plan, double lambda,
                                                     std::size_t workers = 1);

struct LevelReport {
    EstimatorSummary summary;
    std::vector<double> ks;                // per component, against Phi
    DiscrepancyResult joint;
    std::vector<std::optional<double>> target_mean;      // limit of mean / lambda
    std::vector<std::optional<double>> target_variance;  // limit of variance / lambda
    std::vector<std::string> warnings;
};

struct ExperimentReport {
    std::vector<LevelReport> levels;
    std::optional<RateFit> rate;
    std::vector<std::string> warnings;
};

/// Theoretical limits of mean/lambda and variance/lambda per component, where
/// the closed forms apply: d = 1, directed NN family, Poisson process, and
/// indicator test functions. Other components get nullopt.
void attach_targets(const ExperimentPlan& plan, LevelReport& level);

/// Called after each grid intensity has been summarised.
using LevelCallback = std::function<void(double lambda, const LevelReport& level)>;

/// Runs every grid intensity, summarises, and fits the discrepancy rate when
/// the grid has at least three points. Discrepancies below 1/sqrt(N) are
/// excluded from the fit.
[[nodiscard]] ExperimentReport run_experiment(const ExperimentPlan& plan, std::size_t workers = 1,
                                              const LevelCallback& on_level = {});

[[nodiscard]] LevelReport summarise_level(const ExperimentPlan& plan, std::span<const StatVector> samples);

/// Directed NN alpha-power length on disjoint intervals with piecewise
/// constant positive intensities kappa_i.
[[nodiscard]] ExperimentPlan theorem42_plan(WeightExponent alpha, std::span<const double> kappa,
                                            std::span<const Box> intervals, std::vector<double> lambda_grid,
                                            std::size_t replicates, std::uint64_t seed);

[[nodiscard]] ExperimentReport theorem42_experiment(WeightExponent alpha, std::span<const double> kappa,
                                                    std::span<const Box> intervals, std::vector<double> lambda_grid,
                                                    std::size_t replicates, std::uint64_t seed,
                                                    std::size_t workers = 1);

} // namespace stabclt
