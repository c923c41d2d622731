#include "stabclt/special_fn.hpp"

#include "stabclt/errors.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

namespace stabclt {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczosCoefficients = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7,
};

constexpr std::array<double, 21> kFactorials = [] {
    std::array<double, 21> table{};
    double value = 1.0;
    table[0] = 1.0;
    for (std::size_t n = 1; n < table.size(); ++n) {
        value *= static_cast<double>(n);
        table[n] = value;
    }
    return table;
}();

double lanczos_gamma(double x) {
    if (x < 0.5) {
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    }
    x -= 1.0;
    double series = kLanczosCoefficients[0];
    for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i) {
        series += kLanczosCoefficients[i] / (x + static_cast<double>(i));
    }
    const double t = x + kLanczosG + 0.5;
    // t^(x+1/2) split in two halves so that large x does not overflow early.
    const double half_power = std::pow(t, 0.5 * (x + 0.5));
    return std::sqrt(2.0 * std::numbers::pi) * half_power * (half_power * std::exp(-t)) * series;
}

bool is_nonpositive_integer(double v) { return v <= 0.0 && std::floor(v) == v; }

} // namespace

WeightExponent::WeightExponent(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw DomainError("weight exponent must be a finite positive real, got " +
                          std::to_string(alpha));
    }
}

double gamma(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw DomainError("gamma: argument must be a finite positive real, got " +
                          std::to_string(x));
    }
    if (std::floor(x) == x && x <= static_cast<double>(kFactorials.size())) {
        return kFactorials[static_cast<std::size_t>(x) - 1];
    }
    return lanczos_gamma(x);
}

double gauss_2f1(double a, double b, double c, double z, const HypergeometricOptions& options) {
    if (!(std::fabs(z) < 1.0)) {
        throw DomainError("gauss_2f1: requires |z| < 1, got z = " + std::to_string(z));
    }
    const bool terminating = is_nonpositive_integer(a) || is_nonpositive_integer(b);

    double sum = 1.0;
    double term = 1.0;
    int quiet = 0;
    for (int n = 0; n < options.max_terms; ++n) {
        const double dn = static_cast<double>(n);
        const double numerator = (a + dn) * (b + dn);
        if (numerator == 0.0) {
            return sum; // series terminated
        }
        if (c + dn == 0.0) {
            throw PoleError("gauss_2f1: c = " + std::to_string(c) +
                            " is a nonpositive integer reached before the series terminates");
        }
        term *= numerator / ((c + dn) * (dn + 1.0)) * z;
        sum += term;
        if (terminating) {
            continue;
        }
        if (std::fabs(term) <= options.relative_tolerance * std::fabs(sum)) {
            if (++quiet >= options.quiet_terms) {
                return sum;
            }
        } else {
            quiet = 0;
        }
    }
    throw ConvergenceError("gauss_2f1: series did not converge within " +
                           std::to_string(options.max_terms) + " terms");
}

double exp_moment(double alpha) {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw DomainError("exp_moment: alpha must be >= 0");
    }
    return std::pow(2.0, -alpha) * gamma(1.0 + alpha);
}

double v_alpha(WeightExponent exponent) {
    const double a = exponent.value();
    const double g1 = gamma(1.0 + a);
    const double leading = (std::pow(4.0, -a) + 2.0 * std::pow(3.0, -1.0 - 2.0 * a)) * gamma(1.0 + 2.0 * a);
    const double square = std::pow(4.0, -a) * (3.0 + a * a) * g1 * g1;
    const double hyper = 8.0 * (std::pow(6.0, -a - 1.0) * gamma(2.0 + 2.0 * a) / (1.0 + a)) *
                         gauss_2f1(-a, 1.0 + a, 2.0 + a, 1.0 / 3.0);
    return leading - square + hyper;
}

double delta_alpha(WeightExponent exponent) {
    const double a = exponent.value();
    return exp_moment(a) * (1.0 - a);
}

double limiting_mean(WeightExponent alpha, double kappa_integral) {
    if (!(kappa_integral >= 0.0)) {
        throw DomainError("limiting_mean: kappa integral must be >= 0");
    }
    return exp_moment(alpha.value()) * kappa_integral;
}

double limiting_variance(WeightExponent alpha, double kappa_integral) {
    if (!(kappa_integral >= 0.0)) {
        throw DomainError("limiting_variance: kappa integral must be >= 0");
    }
    const double delta = delta_alpha(alpha) * kappa_integral;
    return v_alpha(alpha) * kappa_integral + delta * delta;
}

AsymptoticConstants asymptotic_constants(WeightExponent alpha,
                                         std::span<const double> kappa_integrals) {
    AsymptoticConstants out;
    out.v_alpha = v_alpha(alpha);
    out.delta_alpha = delta_alpha(alpha);
    out.delta_alpha_sq = out.delta_alpha * out.delta_alpha;
    out.limiting_mean_coeff = exp_moment(alpha.value());
    out.sigma_sq_per_region.reserve(kappa_integrals.size());
    for (double integral : kappa_integrals) {
        out.sigma_sq_per_region.push_back(limiting_variance(alpha, integral));
    }
    return out;
}

} // namespace stabclt
