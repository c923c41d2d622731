#pragma once

#include "stabclt/neighbors.hpp"
#include "stabclt/point_process.hpp"
#include "stabclt/regions.hpp"
#include "stabclt/special_fn.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace stabclt {

enum class Family {
    /// xi(x; X) = d(x; X)^alpha, the out-edge of the directed NN graph.
    nn_directed,
    /// Half the alpha-weighted length of undirected kNN-graph edges at x.
    knn_undirected,
};

[[nodiscard]] std::string_view to_string(Family family) noexcept;
[[nodiscard]] Family parse_family(std::string_view name);

struct FunctionalSpec {
    Family family = Family::nn_directed;
    std::size_t k = 1;
    WeightExponent alpha{1.0};
    /// Intensity used for the lambda^{1/d} dilation.
    double lambda = 1.0;

    /// Throws ConfigurationError when k == 0, the directed family has k != 1,
    /// or lambda is not positive.
    void validate() const;
};

/// Bounded test function supported on a region, constant on each of its boxes.
class TestFunctionSpec {
public:
    enum class Kind { indicator, piecewise_constant };

    static TestFunctionSpec indicator(Region region);
    static TestFunctionSpec piecewise(Region region, std::vector<double> values);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const Region& region() const noexcept { return region_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] double sup_norm() const noexcept;
    [[nodiscard]] double operator()(std::span<const double> x) const noexcept;
    [[nodiscard]] TestFunctionSpec translated(std::span<const double> shift) const;

private:
    TestFunctionSpec(Kind kind, Region region, std::vector<double> values);

    Kind kind_;
    Region region_;
    std::vector<double> values_;
};

struct StatVector {
    std::vector<double> values;
    double lambda = 1.0;
    FunctionalSpec spec;
};

// --- single-point evaluations -------------------------------------------

[[nodiscard]] double nn_distance(std::span<const double> x, const PointConfiguration& config);

/// Indices (into config) of the k nearest points to x other than x itself,
/// ordered by distance then index.
[[nodiscard]] std::vector<std::size_t> knn_neighbors(std::span<const double> x,
                                                     const PointConfiguration& config, std::size_t k);

/// Undirected kNN score at x. If x is not a point of config it is added first.
[[nodiscard]] double xi_knn(std::span<const double> x, const PointConfiguration& config,
                            const FunctionalSpec& spec);

[[nodiscard]] double xi_directed_nn(std::span<const double> x, const PointConfiguration& config,
                                    WeightExponent alpha);

// --- whole-configuration evaluations ------------------------------------

/// Unscaled score of every point together with a local determination radius:
/// for the directed family the NN distance; for the kNN family the largest
/// of the k-th neighbour distance and |x - y| + r_k(y) over incident edges {x, y}.
struct PointScores {
    std::vector<double> xi;
    std::vector<double> radius;
};

[[nodiscard]] PointScores point_scores(const PointConfiguration& config, const FunctionalSpec& spec);

/// Undirected kNN graph edges (i < j), each listed once, sorted.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> knn_graph_edges(const PointConfiguration& config,
                                                                               std::size_t k);

/// Sum of d(x; X)^alpha over points of X inside gamma (neighbours anywhere in X).
[[nodiscard]] double l_alpha(const PointConfiguration& config, const Region& gamma, WeightExponent alpha);

/// sum over x in X of xi(lambda^{1/d} x; lambda^{1/d} X) f(x).
[[nodiscard]] double t_statistic(const PointConfiguration& config, const TestFunctionSpec& f,
                                 const FunctionalSpec& spec);

/// Componentwise t_statistic over test functions on pairwise disjoint regions.
[[nodiscard]] StatVector t_vector(const PointConfiguration& config, std::span<const TestFunctionSpec> fs,
                                  const FunctionalSpec& spec);

/// t_statistic restricted to points whose dilated determination radius is at
/// most `threshold`.
[[nodiscard]] double thresholded_t(const PointConfiguration& config, const TestFunctionSpec& f,
                                   const FunctionalSpec& spec, double threshold);

/// Throws ConfigurationError if any two test functions live on overlapping regions.
void require_disjoint(std::span<const TestFunctionSpec> fs);

} // namespace stabclt
