#include "stabclt/point_process.hpp"

#include "stabclt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stabclt {

PointConfiguration::PointConfiguration(std::size_t dimension, std::uint64_t seed, StreamId stream)
    : dimension_(dimension), seed_(seed), stream_(stream) {
    if (dimension_ == 0) {
        throw ConfigurationError("point configuration: dimension must be >= 1");
    }
}

PointConfiguration::PointConfiguration(std::size_t dimension, std::vector<double> coordinates)
    : dimension_(dimension), coordinates_(std::move(coordinates)) {
    if (dimension_ == 0 || coordinates_.size() % dimension_ != 0) {
        throw ConfigurationError("point configuration: coordinate count is not a multiple of the dimension");
    }
}

void PointConfiguration::push_back(std::span<const double> x) {
    if (x.size() != dimension_) {
        throw ConfigurationError("point configuration: point has wrong dimension");
    }
    coordinates_.insert(coordinates_.end(), x.begin(), x.end());
}

// ---------------------------------------------------------------- DensitySpec

DensitySpec::DensitySpec(Region support, std::vector<double> weights, bool probability)
    : support_(std::move(support)), weights_(std::move(weights)), probability_(probability) {
    if (weights_.size() != support_.boxes().size()) {
        throw ConfigurationError("density: expected " + std::to_string(support_.boxes().size()) +
                                 " weights, got " + std::to_string(weights_.size()));
    }
    for (double w : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigurationError("density: weights must be finite and nonnegative");
        }
    }
    if (probability_ && std::fabs(integral() - 1.0) > 1e-9) {
        throw ConfigurationError("density: probability weights integrate to " +
                                 std::to_string(integral()) + ", expected 1");
    }
}

DensitySpec DensitySpec::probability(Region support, std::vector<double> weights) {
    return DensitySpec(std::move(support), std::move(weights), true);
}

DensitySpec DensitySpec::intensity(Region support, std::vector<double> weights) {
    return DensitySpec(std::move(support), std::move(weights), false);
}

DensitySpec DensitySpec::homogeneous(Region support) {
    const double level = 1.0 / support.volume();
    std::vector<double> weights(support.boxes().size(), level);
    return DensitySpec(std::move(support), std::move(weights), true);
}

double DensitySpec::sup_norm() const noexcept { return *std::max_element(weights_.begin(), weights_.end()); }

double DensitySpec::integral() const noexcept {
    double total = 0.0;
    for (std::size_t b = 0; b < weights_.size(); ++b) {
        total += weights_[b] * support_.boxes()[b].volume();
    }
    return total;
}

double DensitySpec::integral_over(const Region& region) const noexcept {
    double total = 0.0;
    for (std::size_t b = 0; b < weights_.size(); ++b) {
        if (weights_[b] > 0.0) {
            total += weights_[b] * region.intersection_volume(support_.boxes()[b]);
        }
    }
    return total;
}

double DensitySpec::value(std::span<const double> x) const noexcept {
    const auto box = support_.locate(x);
    return box ? weights_[*box] : 0.0;
}

DensitySpec DensitySpec::translated(std::span<const double> shift) const {
    return DensitySpec(support_.translated(shift), weights_, probability_);
}

// ---------------------------------------------------------------- samplers

namespace {

void append_uniform(PointConfiguration& out, const Box& box, Philox4x32& engine, std::vector<double>& x) {
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double lo = box.lower()[j];
        const double hi = box.upper()[j];
        double v = lo + (hi - lo) * uniform01(engine);
        // Rounding can land exactly on the open upper face.
        if (v >= hi) {
            v = std::nextafter(hi, lo);
        }
        x[j] = v;
    }
    out.push_back(x);
}

PointConfiguration sample_weighted(const Region& region, std::span<const double> box_mass, std::size_t n,
                                   std::uint64_t seed, StreamId stream) {
    PointConfiguration out(region.dimension(), seed, stream);
    if (n == 0) {
        return out;
    }
    std::vector<double> cumulative(box_mass.size());
    double total = 0.0;
    for (std::size_t b = 0; b < box_mass.size(); ++b) {
        total += box_mass[b];
        cumulative[b] = total;
    }
    Philox4x32 engine(seed, stream);
    std::vector<double> x(region.dimension());
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform01(engine) * total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t b = static_cast<std::size_t>(it - cumulative.begin());
        b = std::min(b, cumulative.size() - 1);
        while (box_mass[b] == 0.0 && b > 0) {
            --b;
        }
        append_uniform(out, region.boxes()[b], engine, x);
    }
    return out;
}

} // namespace

PointConfiguration sample_poisson(const DensitySpec& density, double lambda, std::uint64_t seed,
                                  StreamId stream) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("sample_poisson: lambda must be positive");
    }
    const Region& support = density.support();
    PointConfiguration out(support.dimension(), seed, stream);
    Philox4x32 engine(seed, stream);
    std::vector<double> x(support.dimension());
    for (std::size_t b = 0; b < support.boxes().size(); ++b) {
        const Box& box = support.boxes()[b];
        const double mean = lambda * density.weights()[b] * box.volume();
        const std::uint64_t count = poisson(engine, mean);
        out.reserve(out.size() + count);
        for (std::uint64_t i = 0; i < count; ++i) {
            append_uniform(out, box, engine, x);
        }
    }
    return out;
}

PointConfiguration sample_binomial(const Region& region, std::size_t n, std::uint64_t seed, StreamId stream) {
    std::vector<double> mass;
    for (const auto& box : region.boxes()) {
        mass.push_back(box.volume());
    }
    return sample_weighted(region, mass, n, seed, stream);
}

PointConfiguration sample_binomial(const DensitySpec& density, std::size_t n, std::uint64_t seed,
                                   StreamId stream) {
    std::vector<double> mass;
    for (std::size_t b = 0; b < density.weights().size(); ++b) {
        mass.push_back(density.weights()[b] * density.support().boxes()[b].volume());
    }
    if (n > 0 && density.integral() <= 0.0) {
        throw DomainError("sample_binomial: density has zero mass");
    }
    return sample_weighted(density.support(), mass, n, seed, stream);
}

PointConfiguration sample_homogeneous_line(double intensity, const Box& window, std::uint64_t seed,
                                           StreamId stream) {
    if (window.dimension() != 1) {
        throw DomainError("sample_homogeneous_line: window must be one-dimensional");
    }
    if (!(intensity > 0.0)) {
        throw DomainError("sample_homogeneous_line: intensity must be positive");
    }
    return sample_poisson(DensitySpec::intensity(Region({window}), {intensity}), 1.0, seed, stream);
}

} // namespace stabclt
