#pragma once

#include "stabclt/functionals.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace stabclt {

/// Standard normal distribution function.
[[nodiscard]] double normal_cdf(double x) noexcept;

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y on x (at least two points, x not constant).
[[nodiscard]] LinearFit least_squares(std::span<const double> x, std::span<const double> y);

/// Moment estimates over N replicate vectors of length m.
struct EstimatorSummary {
    double lambda = 1.0;
    std::size_t count = 0;
    std::vector<double> mean;
    std::vector<double> variance;      // unbiased, N - 1 denominator
    std::vector<double> se_mean;       // sqrt(variance / N)
    std::vector<double> se_variance;   // from the fourth central moment
    std::vector<std::vector<double>> covariance;
    /// mean / lambda and variance / lambda: the normalisations under which the
    /// statistic has a nondegenerate limit.
    std::vector<double> scaled_mean;
    std::vector<double> scaled_variance;
    std::vector<double> se_scaled_mean;
    std::vector<double> se_scaled_variance;

    [[nodiscard]] std::size_t components() const noexcept { return mean.size(); }
    [[nodiscard]] std::vector<std::vector<double>> correlation() const;
};

/// Sums are accumulated in sample order, so the result depends only on the
/// sample sequence.
[[nodiscard]] EstimatorSummary estimate_moments(std::span<const StatVector> samples);

/// (T_i - mean_i) / sqrt(var_i) componentwise using the supplied estimates.
[[nodiscard]] std::vector<StatVector> standardize(std::span<const StatVector> samples,
                                                  const EstimatorSummary& summary);

/// sup_t |F_N(t) - Phi(t)| for the empirical distribution of `values`.
[[nodiscard]] double ks_to_normal(std::span<const double> values);

/// Values of component `i` across samples.
[[nodiscard]] std::vector<double> component(std::span<const StatVector> samples, std::size_t i);

constexpr std::size_t kDefaultGridBudget = 10000;

/// Thirteen points from -3 to 3 in steps of 0.5.
[[nodiscard]] std::vector<double> default_t_grid();

struct DiscrepancyResult {
    /// sup over grid nodes of |P_N[Z_i <= t_i for all i] - prod Phi(t_i)|.
    double sup = 0.0;
    std::vector<double> argmax;
};

/// Product-form Kolmogorov discrepancy on the full m-fold product of `t_grid`.
/// Throws GridTooLargeError when m * |grid|^m exceeds `budget`.
[[nodiscard]] DiscrepancyResult product_form_discrepancy(std::span<const StatVector> standardized,
                                                         std::span<const double> t_grid,
                                                         std::size_t budget = kDefaultGridBudget);

struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> lambdas;   // grid points that entered the fit
    std::vector<std::string> warnings;
};

/// Least-squares fit of log D against log lambda. Pairs with D == 0 or D below
/// `noise_floor` are dropped with a warning; fewer than three survivors throws.
[[nodiscard]] RateFit fit_rate(std::span<const double> lambdas, std::span<const double> discrepancies,
                               double noise_floor = 0.0);

} // namespace stabclt
