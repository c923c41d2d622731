#pragma once

#include "stabclt/point_process.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace stabclt {

struct Neighbor {
    std::size_t index = 0;
    double squared_distance = 0.0;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Squared Euclidean distance, accumulated axis by axis from zero.
[[nodiscard]] inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a[j] - b[j];
        acc += t * t;
    }
    return acc;
}

/// Exact k-nearest-neighbour search over a fixed configuration.
///
/// d = 1 uses a sorted coordinate array; d >= 2 uses a uniform grid of
/// roughly one point per cell searched in Chebyshev shells. Results are
/// ordered by (squared distance, canonical index), so ties resolve towards
/// the earlier generated point. The index refers to the configuration, which
/// must outlive it.
class NeighborIndex {
public:
    explicit NeighborIndex(const PointConfiguration& config);

    [[nodiscard]] const PointConfiguration& configuration() const noexcept { return *config_; }

    /// k nearest points to stored point i, excluding i itself.
    [[nodiscard]] std::vector<Neighbor> nearest(std::size_t i, std::size_t k) const;

    /// k nearest points to x, excluding stored points equal to x.
    [[nodiscard]] std::vector<Neighbor> nearest(std::span<const double> x, std::size_t k) const;

    /// Distance from every stored point to its nearest other point.
    [[nodiscard]] std::vector<double> nn_distances() const;

private:
    template <typename Skip>
    std::vector<Neighbor> search(std::span<const double> x, std::size_t k, Skip skip) const;
    template <typename Skip>
    std::vector<Neighbor> search_line(double x, std::size_t k, Skip skip) const;
    template <typename Skip>
    std::vector<Neighbor> search_grid(std::span<const double> x, std::size_t k, Skip skip) const;

    [[nodiscard]] std::size_t cell_coordinate(double v, std::size_t axis) const noexcept;

    const PointConfiguration* config_;

    // d = 1
    std::vector<double> sorted_coords_;
    std::vector<std::size_t> sorted_index_;

    // d >= 2
    std::vector<double> origin_;
    double cell_side_ = 1.0;
    std::vector<std::size_t> cells_per_axis_;
    std::vector<std::size_t> cell_stride_;
    std::vector<std::size_t> cell_start_;
    std::vector<std::size_t> cell_points_;
};

} // namespace stabclt
