#pragma once

#include <span>
#include <vector>

namespace stabclt {

/// Edge-weight power applied to nearest-neighbour distances. Always > 0.
class WeightExponent {
public:
    explicit WeightExponent(double alpha);

    [[nodiscard]] double value() const noexcept { return alpha_; }

    friend bool operator==(const WeightExponent&, const WeightExponent&) = default;

private:
    double alpha_;
};

struct HypergeometricOptions {
    double relative_tolerance = 1e-13;
    int max_terms = 10000;
    /// Number of consecutive negligible terms required before stopping.
    int quiet_terms = 3;
};

/// Euler Gamma function for x > 0 (Lanczos, g = 7, with reflection below 1/2).
/// Integer arguments up to 20 are returned exactly from a factorial table.
[[nodiscard]] double gamma(double x);

/// Gauss hypergeometric 2F1(a, b; c; z) by direct series for |z| < 1.
/// Terminating series (a or b a nonpositive integer) are summed to the last term.
[[nodiscard]] double gauss_2f1(double a, double b, double c, double z,
                               const HypergeometricOptions& options = {});

/// Limiting scaled variance of the directed nearest-neighbour α-power length
/// for n uniform points on the unit interval.
[[nodiscard]] double v_alpha(WeightExponent alpha);

/// Signed Poisson excess coefficient 2^{-α} Γ(1+α) (1-α).
[[nodiscard]] double delta_alpha(WeightExponent alpha);

/// E[D^α] for D ~ Exp(2), i.e. 2^{-α} Γ(1+α). Accepts alpha = 0.
[[nodiscard]] double exp_moment(double alpha);

[[nodiscard]] double limiting_mean(WeightExponent alpha, double kappa_integral);
[[nodiscard]] double limiting_variance(WeightExponent alpha, double kappa_integral);

struct AsymptoticConstants {
    double v_alpha = 0.0;
    double delta_alpha = 0.0;
    double delta_alpha_sq = 0.0;
    double limiting_mean_coeff = 0.0;
    std::vector<double> sigma_sq_per_region;
};

[[nodiscard]] AsymptoticConstants asymptotic_constants(WeightExponent alpha,
                                                       std::span<const double> kappa_integrals);

} // namespace stabclt
