#include "stabclt/stabilization.hpp"

#include "stabclt/errors.hpp"
#include "stabclt/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stabclt {

namespace {

constexpr std::uint32_t kLocationSubstream = 0xFFFFFFFFu;

/// Keeps `inner` points within the ball and `outer` points outside it.
PointConfiguration splice(std::span<const double> x, double ball_sq, const PointConfiguration& inner,
                          const PointConfiguration& outer) {
    PointConfiguration out(inner.dimension());
    out.reserve(inner.size());
    for (std::size_t i = 0; i < inner.size(); ++i) {
        if (squared_distance(x, inner.point(i)) <= ball_sq) {
            out.push_back(inner.point(i));
        }
    }
    for (std::size_t i = 0; i < outer.size(); ++i) {
        if (squared_distance(x, outer.point(i)) > ball_sq) {
            out.push_back(outer.point(i));
        }
    }
    return out;
}

double diameter(const Region& region) {
    const Box box = region.bounding_box();
    double acc = 0.0;
    for (std::size_t j = 0; j < box.dimension(); ++j) {
        const double w = box.upper()[j] - box.lower()[j];
        acc += w * w;
    }
    return std::sqrt(acc);
}

/// NaN when x has too few neighbours, so the comparison below never matches.
double guarded(const LocalScore& score, std::span<const double> x, const PointConfiguration& others) {
    try {
        return score(x, others);
    } catch (const InsufficientPointsError&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace

StabilizationProbeResult stabilization_probe(const DensitySpec& density, double lambda, const LocalScore& score,
                                             const ProbeOptions& options, std::uint64_t seed) {
    if (!(lambda >= 1.0)) {
        throw DomainError("stabilization_probe: lambda must be >= 1");
    }
    if (options.probe_count == 0 || options.resample_count == 0) {
        throw DomainError("stabilization_probe: probe_count and resample_count must be positive");
    }
    if (!(options.tolerance > 0.0)) {
        throw DomainError("stabilization_probe: tolerance must be positive");
    }
    const std::size_t d = density.dimension();
    const double dilation = std::pow(lambda, 1.0 / static_cast<double>(d));
    const double max_radius =
        std::isfinite(options.max_radius) ? options.max_radius : dilation * diameter(density.support());

    StabilizationProbeResult result;
    result.radii.reserve(options.probe_count);
    result.censored.reserve(options.probe_count);

    std::vector<PointConfiguration> redraws;
    for (std::size_t p = 0; p < options.probe_count; ++p) {
        const PointConfiguration location = sample_binomial(density, 1, seed, StreamId{p, kLocationSubstream});
        const auto x = location.point(0);
        const PointConfiguration base = sample_poisson(density, lambda, seed, StreamId{p, 0});
        redraws.clear();
        for (std::size_t j = 0; j < options.resample_count; ++j) {
            redraws.push_back(sample_poisson(density, lambda, seed, StreamId{p, static_cast<std::uint32_t>(j + 1)}));
        }
        const double reference = guarded(score, x, base);

        auto invariant = [&](double dilated_radius) {
            const double r = dilated_radius / dilation;
            const double ball_sq = r * r;
            for (const auto& redraw : redraws) {
                if (guarded(score, x, splice(x, ball_sq, base, redraw)) != reference) {
                    return false;
                }
            }
            return true;
        };

        if (invariant(0.0)) {
            result.radii.push_back(0.0);
            result.censored.push_back(false);
            continue;
        }
        if (!invariant(max_radius)) {
            result.radii.push_back(max_radius);
            result.censored.push_back(true);
            continue;
        }
        double lo = 0.0;
        double hi = max_radius;
        while (hi - lo > options.tolerance) {
            const double mid = 0.5 * (lo + hi);
            (invariant(mid) ? hi : lo) = mid;
        }
        result.radii.push_back(hi);
        result.censored.push_back(false);
    }

    // Tail table on an even grid up to the 99th percentile.
    std::vector<double> sorted = result.radii;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double top = sorted[std::min(n - 1, static_cast<std::size_t>(std::floor(0.99 * static_cast<double>(n))))];
    const double median = sorted[n / 2];
    const std::size_t g = std::max<std::size_t>(options.grid_points, 2);
    std::vector<double> fit_t, fit_log;
    for (std::size_t i = 0; i < g; ++i) {
        const double t = top * static_cast<double>(i) / static_cast<double>(g - 1);
        std::size_t exceed = 0;
        std::size_t unknown = 0;
        for (std::size_t p = 0; p < n; ++p) {
            if (result.radii[p] > t) {
                ++exceed;
            } else if (result.censored[p]) {
                ++unknown;
            }
        }
        const double prob = static_cast<double>(exceed) / static_cast<double>(n);
        result.t_grid.push_back(t);
        result.tail_probs.push_back(prob);
        result.censored_counts.push_back(unknown);
        if (t >= median && exceed >= options.min_tail_count) {
            fit_t.push_back(t);
            fit_log.push_back(std::log(prob));
        }
    }
    if (fit_t.size() >= 3) {
        const LinearFit fit = least_squares(fit_t, fit_log);
        result.decay_slope = fit.slope;
        result.r_squared = fit.r_squared;
    }
    result.fitted_points = fit_t.size();
    return result;
}

StabilizationProbeResult stabilization_probe(const DensitySpec& density, double lambda, const FunctionalSpec& spec,
                                             const ProbeOptions& options, std::uint64_t seed) {
    spec.validate();
    LocalScore score;
    if (spec.family == Family::nn_directed) {
        score = [alpha = spec.alpha](std::span<const double> x, const PointConfiguration& others) {
            return xi_directed_nn(x, others, alpha);
        };
    } else {
        score = [spec](std::span<const double> x, const PointConfiguration& others) {
            return xi_knn(x, others, spec);
        };
    }
    return stabilization_probe(density, lambda, score, options, seed);
}

} // namespace stabclt
