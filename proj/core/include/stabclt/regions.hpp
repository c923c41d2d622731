#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace stabclt {

/// Axis-aligned box. Membership is half-open: lower <= x < upper on every axis.
class Box {
public:
    Box(std::vector<double> lower, std::vector<double> upper);

    /// Convenience for d = 1.
    static Box interval(double lower, double upper);

    [[nodiscard]] std::size_t dimension() const noexcept { return lower_.size(); }
    [[nodiscard]] const std::vector<double>& lower() const noexcept { return lower_; }
    [[nodiscard]] const std::vector<double>& upper() const noexcept { return upper_; }
    [[nodiscard]] double volume() const noexcept;
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;
    /// Volume of the intersection with another box of the same dimension.
    [[nodiscard]] double intersection_volume(const Box& other) const noexcept;
    [[nodiscard]] Box scaled(double factor) const;
    [[nodiscard]] Box translated(std::span<const double> shift) const;

    friend bool operator==(const Box&, const Box&) = default;

private:
    std::vector<double> lower_;
    std::vector<double> upper_;
};

enum class Norm { l2, linf };

/// Finite union of pairwise disjoint boxes sharing one dimension.
class Region {
public:
    Region(std::size_t dimension, std::vector<Box> boxes);
    explicit Region(std::vector<Box> boxes);

    static Region interval(double lower, double upper);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] const std::vector<Box>& boxes() const noexcept { return boxes_; }
    [[nodiscard]] double volume() const noexcept;
    [[nodiscard]] bool contains(std::span<const double> x) const noexcept;
    /// Index of the box containing x, if any.
    [[nodiscard]] std::optional<std::size_t> locate(std::span<const double> x) const noexcept;
    [[nodiscard]] Box bounding_box() const;
    [[nodiscard]] double intersection_volume(const Box& box) const noexcept;
    [[nodiscard]] bool overlaps(const Region& other) const noexcept;
    [[nodiscard]] Region translated(std::span<const double> shift) const;
    [[nodiscard]] Region scaled(double factor) const;

    /// Distance from x to the topological boundary of the union.
    [[nodiscard]] double distance_to_boundary(std::span<const double> x, Norm norm) const;

private:
    struct Face {
        std::size_t axis;
        double position;
        std::vector<double> lower; // extent on all axes; the entry for `axis` is unused
        std::vector<double> upper;
    };

    void build_faces();

    std::size_t dimension_;
    std::vector<Box> boxes_;
    std::vector<Face> faces_;
};

[[nodiscard]] double volume(const Region& region) noexcept;
[[nodiscard]] double dist_to_boundary(std::span<const double> x, const Region& region, Norm norm);

/// Parameters of the intensity-dependent boundary layer and cube lattices.
struct LatticeParams {
    double lambda = 1.0;
    /// Multiplier of the boundary-layer width.
    double stab_constant = 1.0;

    /// stab_constant * lambda^{-1/d} * log(lambda).
    [[nodiscard]] double boundary_width(std::size_t dimension) const;
};

/// Partition of a region into the boundary layer (sup-norm distance to the
/// boundary at most the layer width) and its complement.
class BoundarySplit {
public:
    BoundarySplit(Region region, double width);

    [[nodiscard]] double width() const noexcept { return width_; }
    [[nodiscard]] const Region& region() const noexcept { return region_; }
    [[nodiscard]] bool is_boundary(std::span<const double> x) const;
    [[nodiscard]] bool is_interior(std::span<const double> x) const;

private:
    Region region_;
    double width_;
};

[[nodiscard]] BoundarySplit boundary_split(const Region& region, const LatticeParams& params);

/// Exact measure of the boundary layer of width `width` for a d = 1 region.
[[nodiscard]] double boundary_measure_1d(const Region& region, double width);

/// Monte Carlo estimate of the boundary-layer volume (any dimension).
[[nodiscard]] double boundary_measure_mc(const Region& region, double width, std::size_t samples,
                                         std::uint64_t seed);

enum class CoverKind { covering, packing };

/// Integer lattice centres of unit cubes [z - 1/2, z + 1/2]^d.
struct CubeCover {
    CoverKind kind = CoverKind::covering;
    std::vector<std::vector<std::int64_t>> centers; // lexicographically sorted
    [[nodiscard]] std::size_t count() const noexcept { return centers.size(); }
};

/// Cubes whose closure meets lambda^{1/d} * region.
[[nodiscard]] CubeCover covering(const Region& region, double lambda);
/// Cubes contained in the closure of lambda^{1/d} * region.
[[nodiscard]] CubeCover packing(const Region& region, double lambda);

} // namespace stabclt
