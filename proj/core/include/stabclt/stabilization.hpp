#pragma once

#include "stabclt/functionals.hpp"
#include "stabclt/point_process.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace stabclt {

/// A score xi(x; X) evaluated at a location x that is not itself part of X.
using LocalScore = std::function<double(std::span<const double> x, const PointConfiguration& others)>;

struct ProbeOptions {
    std::size_t probe_count = 500;
    std::size_t resample_count = 8;
    /// Largest dilated radius examined; non-finite means the dilated diameter
    /// of the support.
    double max_radius = std::numeric_limits<double>::infinity();
    /// Width of the final binary-search bracket, in dilated units.
    double tolerance = 1e-3;
    std::size_t grid_points = 24;
    /// Minimum number of exceedances for a grid point to enter the tail fit.
    std::size_t min_tail_count = 5;
};

struct StabilizationProbeResult {
    /// Empirical radii in dilated units, one per probe; censored entries are lower bounds.
    std::vector<double> radii;
    std::vector<bool> censored;
    std::vector<double> t_grid;
    /// Estimated P[R > t] at each grid point (nonincreasing).
    std::vector<double> tail_probs;
    /// Censored radii not exceeding t, i.e. probes whose status at t is unknown.
    std::vector<std::size_t> censored_counts;
    /// Least-squares slope and R^2 of log P[R > t] against t over the upper tail.
    double decay_slope = std::numeric_limits<double>::quiet_NaN();
    double r_squared = std::numeric_limits<double>::quiet_NaN();
    std::size_t fitted_points = 0;
};

/// Empirical stabilization radii of a score under a Poisson process of
/// intensity lambda * density.
///
/// For each probe location x (drawn from the density), the smallest dilated
/// radius r is located by bisection such that xi(x; .) is unchanged across
/// `resample_count` independent redraws of all points farther than
/// lambda^{-1/d} r from x. Probe p draws its base configuration from stream p,
/// substream 0, and its redraws from substreams 1..resample_count.
[[nodiscard]] StabilizationProbeResult stabilization_probe(const DensitySpec& density, double lambda,
                                                           const LocalScore& score, const ProbeOptions& options,
                                                           std::uint64_t seed);

[[nodiscard]] StabilizationProbeResult stabilization_probe(const DensitySpec& density, double lambda,
                                                           const FunctionalSpec& spec, const ProbeOptions& options,
                                                           std::uint64_t seed);

} // namespace stabclt
