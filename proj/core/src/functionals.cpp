#include "stabclt/functionals.hpp"

#include "stabclt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stabclt {

namespace {

double edge_weight(double length, double alpha) noexcept {
    if (alpha == 1.0) {
        return length;
    }
    if (alpha == 2.0) {
        return length * length;
    }
    return std::pow(length, alpha);
}

std::size_t neighbours_needed(const FunctionalSpec& spec) noexcept {
    return spec.family == Family::nn_directed ? 1 : spec.k;
}

double dilation_factor(const FunctionalSpec& spec, std::size_t dimension) {
    return std::pow(spec.lambda, 1.0 / static_cast<double>(dimension));
}

std::size_t find_point(std::span<const double> x, const PointConfiguration& config) {
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto p = config.point(i);
        if (std::equal(p.begin(), p.end(), x.begin())) {
            return i;
        }
    }
    return config.size();
}

/// Sum of scaled scores times f over points with dilated radius <= threshold.
double weighted_sum(const PointConfiguration& config, const TestFunctionSpec& f, const FunctionalSpec& spec,
                    double threshold) {
    spec.validate();
    if (f.region().dimension() != config.dimension()) {
        throw ConfigurationError("test function dimension does not match configuration");
    }
    bool any_inside = false;
    for (std::size_t i = 0; i < config.size() && !any_inside; ++i) {
        any_inside = f.region().contains(config.point(i));
    }
    if (!any_inside) {
        return 0.0;
    }
    if (config.size() < neighbours_needed(spec) + 1) {
        throw InsufficientPointsError("statistic: region is occupied but the configuration has only " +
                                      std::to_string(config.size()) + " points");
    }
    const PointScores scores = point_scores(config, spec);
    const double dilation = dilation_factor(spec, config.dimension());
    const double scale = std::pow(dilation, spec.alpha.value());
    double total = 0.0;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const double fx = f(config.point(i));
        if (fx != 0.0 && dilation * scores.radius[i] <= threshold) {
            total += scores.xi[i] * fx;
        }
    }
    return scale * total;
}

} // namespace

std::string_view to_string(Family family) noexcept {
    return family == Family::nn_directed ? "nn_directed" : "knn_undirected";
}

Family parse_family(std::string_view name) {
    if (name == "nn_directed") {
        return Family::nn_directed;
    }
    if (name == "knn_undirected") {
        return Family::knn_undirected;
    }
    throw ConfigurationError("unknown functional family '" + std::string(name) +
                             "' (expected nn_directed or knn_undirected)");
}

void FunctionalSpec::validate() const {
    if (k == 0) {
        throw ConfigurationError("functional: k must be >= 1");
    }
    if (family == Family::nn_directed && k != 1) {
        throw ConfigurationError("functional: the directed nearest-neighbour family requires k = 1");
    }
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw ConfigurationError("functional: lambda must be positive");
    }
}

// ---------------------------------------------------------------- TestFunctionSpec

TestFunctionSpec::TestFunctionSpec(Kind kind, Region region, std::vector<double> values)
    : kind_(kind), region_(std::move(region)), values_(std::move(values)) {
    if (values_.size() != region_.boxes().size()) {
        throw ConfigurationError("test function: expected one value per box of its region");
    }
    for (double v : values_) {
        if (!std::isfinite(v)) {
            throw ConfigurationError("test function: values must be finite");
        }
    }
}

TestFunctionSpec TestFunctionSpec::indicator(Region region) {
    std::vector<double> ones(region.boxes().size(), 1.0);
    return TestFunctionSpec(Kind::indicator, std::move(region), std::move(ones));
}

TestFunctionSpec TestFunctionSpec::piecewise(Region region, std::vector<double> values) {
    return TestFunctionSpec(Kind::piecewise_constant, std::move(region), std::move(values));
}

double TestFunctionSpec::sup_norm() const noexcept {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::fabs(v));
    }
    return m;
}

double TestFunctionSpec::operator()(std::span<const double> x) const noexcept {
    const auto box = region_.locate(x);
    return box ? values_[*box] : 0.0;
}

TestFunctionSpec TestFunctionSpec::translated(std::span<const double> shift) const {
    return TestFunctionSpec(kind_, region_.translated(shift), values_);
}

// ---------------------------------------------------------------- single point

double nn_distance(std::span<const double> x, const PointConfiguration& config) {
    if (x.size() != config.dimension()) {
        throw ConfigurationError("nn_distance: point has wrong dimension");
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto p = config.point(i);
        if (std::equal(p.begin(), p.end(), x.begin())) {
            continue;
        }
        best = std::min(best, squared_distance(x, p));
    }
    if (best == std::numeric_limits<double>::infinity()) {
        throw InsufficientPointsError("nn_distance: no point other than x in the configuration");
    }
    return std::sqrt(best);
}

std::vector<std::size_t> knn_neighbors(std::span<const double> x, const PointConfiguration& config,
                                       std::size_t k) {
    const NeighborIndex index(config);
    std::vector<std::size_t> out;
    for (const auto& n : index.nearest(x, k)) {
        out.push_back(n.index);
    }
    return out;
}

double xi_directed_nn(std::span<const double> x, const PointConfiguration& config, WeightExponent alpha) {
    return edge_weight(nn_distance(x, config), alpha.value());
}

double xi_knn(std::span<const double> x, const PointConfiguration& config, const FunctionalSpec& spec) {
    spec.validate();
    if (x.size() != config.dimension()) {
        throw ConfigurationError("xi_knn: point has wrong dimension");
    }
    std::size_t self = find_point(x, config);
    if (self < config.size()) {
        return point_scores(config, FunctionalSpec{Family::knn_undirected, spec.k, spec.alpha, 1.0}).xi[self];
    }
    PointConfiguration augmented = config;
    augmented.push_back(x);
    self = augmented.size() - 1;
    return point_scores(augmented, FunctionalSpec{Family::knn_undirected, spec.k, spec.alpha, 1.0}).xi[self];
}

// ---------------------------------------------------------------- whole configuration

std::vector<std::pair<std::size_t, std::size_t>> knn_graph_edges(const PointConfiguration& config, std::size_t k) {
    const NeighborIndex index(config);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(config.size() * k);
    for (std::size_t i = 0; i < config.size(); ++i) {
        for (const auto& n : index.nearest(i, k)) {
            edges.emplace_back(std::min(i, n.index), std::max(i, n.index));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

PointScores point_scores(const PointConfiguration& config, const FunctionalSpec& spec) {
    spec.validate();
    const std::size_t n = config.size();
    PointScores out;
    out.xi.assign(n, 0.0);
    out.radius.assign(n, 0.0);
    if (n == 0) {
        return out;
    }
    const double alpha = spec.alpha.value();
    const NeighborIndex index(config);

    if (spec.family == Family::nn_directed) {
        out.radius = index.nn_distances();
        for (std::size_t i = 0; i < n; ++i) {
            out.xi[i] = edge_weight(out.radius[i], alpha);
        }
        return out;
    }

    std::vector<double> kth(n);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    edges.reserve(n * spec.k);
    for (std::size_t i = 0; i < n; ++i) {
        const auto nb = index.nearest(i, spec.k);
        kth[i] = std::sqrt(nb.back().squared_distance);
        for (const auto& m : nb) {
            edges.emplace_back(std::min(i, m.index), std::max(i, m.index));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    out.radius = kth;
    for (const auto& [a, b] : edges) {
        const double length = std::sqrt(squared_distance(config.point(a), config.point(b)));
        const double half = 0.5 * edge_weight(length, alpha);
        out.xi[a] += half;
        out.xi[b] += half;
        out.radius[a] = std::max(out.radius[a], length + kth[b]);
        out.radius[b] = std::max(out.radius[b], length + kth[a]);
    }
    return out;
}

double l_alpha(const PointConfiguration& config, const Region& gamma, WeightExponent alpha) {
    return t_statistic(config, TestFunctionSpec::indicator(gamma),
                       FunctionalSpec{Family::nn_directed, 1, alpha, 1.0});
}

double t_statistic(const PointConfiguration& config, const TestFunctionSpec& f, const FunctionalSpec& spec) {
    return weighted_sum(config, f, spec, std::numeric_limits<double>::infinity());
}

double thresholded_t(const PointConfiguration& config, const TestFunctionSpec& f, const FunctionalSpec& spec,
                     double threshold) {
    if (!(threshold >= 0.0)) {
        throw DomainError("thresholded_t: threshold must be >= 0");
    }
    return weighted_sum(config, f, spec, threshold);
}

void require_disjoint(std::span<const TestFunctionSpec> fs) {
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            if (fs[i].region().overlaps(fs[j].region())) {
                throw ConfigurationError("regions " + std::to_string(i) + " and " + std::to_string(j) +
                                         " overlap");
            }
        }
    }
}

StatVector t_vector(const PointConfiguration& config, std::span<const TestFunctionSpec> fs,
                    const FunctionalSpec& spec) {
    spec.validate();
    require_disjoint(fs);
    StatVector out;
    out.values.assign(fs.size(), 0.0);
    out.lambda = spec.lambda;
    out.spec = spec;

    // Owner region of each point (regions are disjoint, so at most one).
    std::vector<std::size_t> owner(config.size(), fs.size());
    bool any_inside = false;
    for (std::size_t i = 0; i < config.size(); ++i) {
        const auto p = config.point(i);
        for (std::size_t r = 0; r < fs.size(); ++r) {
            if (fs[r].region().contains(p)) {
                owner[i] = r;
                any_inside = true;
                break;
            }
        }
    }
    if (!any_inside) {
        return out;
    }
    if (config.size() < neighbours_needed(spec) + 1) {
        throw InsufficientPointsError("t_vector: a region is occupied but the configuration has only " +
                                      std::to_string(config.size()) + " points");
    }
    const PointScores scores = point_scores(config, spec);
    const double scale = std::pow(dilation_factor(spec, config.dimension()), spec.alpha.value());
    for (std::size_t i = 0; i < config.size(); ++i) {
        if (owner[i] < fs.size()) {
            out.values[owner[i]] += scores.xi[i] * fs[owner[i]](config.point(i));
        }
    }
    for (double& v : out.values) {
        v *= scale;
    }
    return out;
}

} // namespace stabclt
