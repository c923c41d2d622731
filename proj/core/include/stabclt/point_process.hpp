#pragma once

#include "stabclt/regions.hpp"
#include "stabclt/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace stabclt {

/// Finite point set in d-space. Points are stored row-major in generation
/// order, which is also the canonical order used for tie-breaking.
class PointConfiguration {
public:
    explicit PointConfiguration(std::size_t dimension, std::uint64_t seed = 0, StreamId stream = {});
    PointConfiguration(std::size_t dimension, std::vector<double> coordinates);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] std::size_t size() const noexcept { return coordinates_.size() / dimension_; }
    [[nodiscard]] bool empty() const noexcept { return coordinates_.empty(); }
    [[nodiscard]] std::span<const double> point(std::size_t i) const noexcept {
        return {coordinates_.data() + i * dimension_, dimension_};
    }
    [[nodiscard]] const std::vector<double>& coordinates() const noexcept { return coordinates_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] StreamId stream() const noexcept { return stream_; }

    void push_back(std::span<const double> x);
    void reserve(std::size_t n) { coordinates_.reserve(n * dimension_); }

    friend bool operator==(const PointConfiguration&, const PointConfiguration&) = default;

private:
    std::size_t dimension_;
    std::vector<double> coordinates_;
    std::uint64_t seed_ = 0;
    StreamId stream_{};
};

/// Piecewise-constant density: one nonnegative weight per box of the support.
class DensitySpec {
public:
    /// Probability density; the weights must integrate to one within 1e-9.
    static DensitySpec probability(Region support, std::vector<double> weights);
    /// Intensity profile with arbitrary total mass, possibly zero (an empty process).
    static DensitySpec intensity(Region support, std::vector<double> weights);
    /// Uniform probability density on the support.
    static DensitySpec homogeneous(Region support);

    [[nodiscard]] const Region& support() const noexcept { return support_; }
    [[nodiscard]] const std::vector<double>& weights() const noexcept { return weights_; }
    [[nodiscard]] bool is_probability() const noexcept { return probability_; }
    [[nodiscard]] std::size_t dimension() const noexcept { return support_.dimension(); }
    [[nodiscard]] double sup_norm() const noexcept;
    [[nodiscard]] double integral() const noexcept;
    /// Integral of the density over a region of the same dimension.
    [[nodiscard]] double integral_over(const Region& region) const noexcept;
    [[nodiscard]] double value(std::span<const double> x) const noexcept;
    [[nodiscard]] DensitySpec translated(std::span<const double> shift) const;

private:
    DensitySpec(Region support, std::vector<double> weights, bool probability);

    Region support_;
    std::vector<double> weights_;
    bool probability_;
};

/// Poisson process with intensity lambda * density. Boxes are sampled in order;
/// each box receives a Poisson count followed by that many uniform points.
[[nodiscard]] PointConfiguration sample_poisson(const DensitySpec& density, double lambda,
                                                std::uint64_t seed, StreamId stream);

/// n i.i.d. points uniform on the region.
[[nodiscard]] PointConfiguration sample_binomial(const Region& region, std::size_t n,
                                                 std::uint64_t seed, StreamId stream);

/// n i.i.d. points with law proportional to the density.
[[nodiscard]] PointConfiguration sample_binomial(const DensitySpec& density, std::size_t n,
                                                 std::uint64_t seed, StreamId stream);

/// Homogeneous Poisson process of the given intensity on a one-dimensional window.
[[nodiscard]] PointConfiguration sample_homogeneous_line(double intensity, const Box& window,
                                                         std::uint64_t seed, StreamId stream);

} // namespace stabclt
