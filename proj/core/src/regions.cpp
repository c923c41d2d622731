#include "stabclt/regions.hpp"

#include "stabclt/errors.hpp"
#include "stabclt/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace stabclt {

// ---------------------------------------------------------------- Box

Box::Box(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.empty() || lower_.size() != upper_.size()) {
        throw ConfigurationError("box: lower and upper must be nonempty and of equal dimension");
    }
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j])) {
            throw ConfigurationError("box: require finite lower < upper on axis " + std::to_string(j));
        }
    }
}

Box Box::interval(double lower, double upper) { return Box({lower}, {upper}); }

double Box::volume() const noexcept {
    double v = 1.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        v *= upper_[j] - lower_[j];
    }
    return v;
}

bool Box::contains(std::span<const double> x) const noexcept {
    if (x.size() != lower_.size()) {
        return false;
    }
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        if (!(x[j] >= lower_[j] && x[j] < upper_[j])) {
            return false;
        }
    }
    return true;
}

double Box::intersection_volume(const Box& other) const noexcept {
    if (other.dimension() != dimension()) {
        return 0.0;
    }
    double v = 1.0;
    for (std::size_t j = 0; j < lower_.size(); ++j) {
        const double lo = std::max(lower_[j], other.lower_[j]);
        const double hi = std::min(upper_[j], other.upper_[j]);
        if (!(hi > lo)) {
            return 0.0;
        }
        v *= hi - lo;
    }
    return v;
}

Box Box::scaled(double factor) const {
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t j = 0; j < lo.size(); ++j) {
        lo[j] *= factor;
        hi[j] *= factor;
    }
    return Box(std::move(lo), std::move(hi));
}

Box Box::translated(std::span<const double> shift) const {
    if (shift.size() != dimension()) {
        throw ConfigurationError("box: translation vector has wrong dimension");
    }
    std::vector<double> lo(lower_), hi(upper_);
    for (std::size_t j = 0; j < lo.size(); ++j) {
        lo[j] += shift[j];
        hi[j] += shift[j];
    }
    return Box(std::move(lo), std::move(hi));
}

// ---------------------------------------------------------------- Region

Region::Region(std::size_t dimension, std::vector<Box> boxes)
    : dimension_(dimension), boxes_(std::move(boxes)) {
    if (dimension_ == 0) {
        throw ConfigurationError("region: dimension must be >= 1");
    }
    if (boxes_.empty()) {
        throw ConfigurationError("region: at least one box is required");
    }
    for (const auto& box : boxes_) {
        if (box.dimension() != dimension_) {
            throw ConfigurationError("region: box dimension " + std::to_string(box.dimension()) +
                                     " does not match region dimension " +
                                     std::to_string(dimension_));
        }
    }
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        for (std::size_t k = i + 1; k < boxes_.size(); ++k) {
            if (boxes_[i].intersection_volume(boxes_[k]) > 0.0) {
                throw ConfigurationError("region: boxes " + std::to_string(i) + " and " +
                                         std::to_string(k) + " overlap");
            }
        }
    }
    build_faces();
}

namespace {

std::size_t leading_dimension(const std::vector<Box>& boxes) noexcept {
    return boxes.empty() ? 0 : boxes.front().dimension();
}

} // namespace

// Copy rather than move: the dimension must be read before the vector is consumed,
// and argument evaluation order is unspecified.
Region::Region(std::vector<Box> boxes) : Region(leading_dimension(boxes), std::vector<Box>(boxes)) {}

Region Region::interval(double lower, double upper) { return Region({Box::interval(lower, upper)}); }

double Region::volume() const noexcept {
    double v = 0.0;
    for (const auto& box : boxes_) {
        v += box.volume();
    }
    return v;
}

bool Region::contains(std::span<const double> x) const noexcept { return locate(x).has_value(); }

std::optional<std::size_t> Region::locate(std::span<const double> x) const noexcept {
    for (std::size_t i = 0; i < boxes_.size(); ++i) {
        if (boxes_[i].contains(x)) {
            return i;
        }
    }
    return std::nullopt;
}

Box Region::bounding_box() const {
    std::vector<double> lo(boxes_.front().lower()), hi(boxes_.front().upper());
    for (const auto& box : boxes_) {
        for (std::size_t j = 0; j < dimension_; ++j) {
            lo[j] = std::min(lo[j], box.lower()[j]);
            hi[j] = std::max(hi[j], box.upper()[j]);
        }
    }
    return Box(std::move(lo), std::move(hi));
}

double Region::intersection_volume(const Box& box) const noexcept {
    double v = 0.0;
    for (const auto& own : boxes_) {
        v += own.intersection_volume(box);
    }
    return v;
}

bool Region::overlaps(const Region& other) const noexcept {
    if (other.dimension_ != dimension_) {
        return false;
    }
    for (const auto& box : other.boxes_) {
        if (intersection_volume(box) > 0.0) {
            return true;
        }
    }
    return false;
}

Region Region::translated(std::span<const double> shift) const {
    std::vector<Box> out;
    out.reserve(boxes_.size());
    for (const auto& box : boxes_) {
        out.push_back(box.translated(shift));
    }
    return Region(dimension_, std::move(out));
}

Region Region::scaled(double factor) const {
    std::vector<Box> out;
    out.reserve(boxes_.size());
    for (const auto& box : boxes_) {
        out.push_back(box.scaled(factor));
    }
    return Region(dimension_, std::move(out));
}

void Region::build_faces() {
    // Coordinate compression: every cell of the breakpoint grid is either
    // wholly inside or wholly outside the union, so the boundary is the set of
    // cell faces separating an inside cell from an outside one.
    const std::size_t d = dimension_;
    std::vector<std::vector<double>> breaks(d);
    for (std::size_t j = 0; j < d; ++j) {
        for (const auto& box : boxes_) {
            breaks[j].push_back(box.lower()[j]);
            breaks[j].push_back(box.upper()[j]);
        }
        std::sort(breaks[j].begin(), breaks[j].end());
        breaks[j].erase(std::unique(breaks[j].begin(), breaks[j].end()), breaks[j].end());
    }

    std::vector<std::size_t> extent(d), stride(d);
    std::size_t cells = 1;
    for (std::size_t j = 0; j < d; ++j) {
        extent[j] = breaks[j].size() - 1;
        stride[j] = cells;
        cells *= extent[j];
    }

    std::vector<char> inside(cells, 0);
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> center(d);
    for (std::size_t c = 0; c < cells; ++c) {
        std::size_t rem = c;
        for (std::size_t j = 0; j < d; ++j) {
            idx[j] = rem % extent[j];
            rem /= extent[j];
            center[j] = 0.5 * (breaks[j][idx[j]] + breaks[j][idx[j] + 1]);
        }
        inside[c] = contains(center) ? 1 : 0;
    }

    faces_.clear();
    for (std::size_t c = 0; c < cells; ++c) {
        if (!inside[c]) {
            continue;
        }
        std::size_t rem = c;
        for (std::size_t j = 0; j < d; ++j) {
            idx[j] = rem % extent[j];
            rem /= extent[j];
        }
        for (std::size_t axis = 0; axis < d; ++axis) {
            for (int dir : {-1, +1}) {
                bool exposed = false;
                if (dir < 0) {
                    exposed = idx[axis] == 0 || !inside[c - stride[axis]];
                } else {
                    exposed = idx[axis] + 1 == extent[axis] || !inside[c + stride[axis]];
                }
                if (!exposed) {
                    continue;
                }
                Face face;
                face.axis = axis;
                face.position = breaks[axis][idx[axis] + (dir > 0 ? 1 : 0)];
                face.lower.resize(d);
                face.upper.resize(d);
                for (std::size_t k = 0; k < d; ++k) {
                    face.lower[k] = breaks[k][idx[k]];
                    face.upper[k] = breaks[k][idx[k] + 1];
                }
                faces_.push_back(std::move(face));
            }
        }
    }
}

double Region::distance_to_boundary(std::span<const double> x, Norm norm) const {
    if (x.size() != dimension_) {
        throw ConfigurationError("distance_to_boundary: point has wrong dimension");
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& face : faces_) {
        double acc = 0.0;
        for (std::size_t k = 0; k < dimension_; ++k) {
            double gap = 0.0;
            if (k == face.axis) {
                gap = std::fabs(x[k] - face.position);
            } else if (x[k] < face.lower[k]) {
                gap = face.lower[k] - x[k];
            } else if (x[k] > face.upper[k]) {
                gap = x[k] - face.upper[k];
            }
            acc = norm == Norm::linf ? std::max(acc, gap) : acc + gap * gap;
        }
        best = std::min(best, norm == Norm::linf ? acc : std::sqrt(acc));
    }
    return best;
}

double volume(const Region& region) noexcept { return region.volume(); }

double dist_to_boundary(std::span<const double> x, const Region& region, Norm norm) {
    return region.distance_to_boundary(x, norm);
}

// ---------------------------------------------------------------- boundary layer

double LatticeParams::boundary_width(std::size_t dimension) const {
    if (!(lambda > 0.0) || !(stab_constant > 0.0) || dimension == 0) {
        throw DomainError("lattice params: lambda and stab_constant must be positive");
    }
    return stab_constant * std::pow(lambda, -1.0 / static_cast<double>(dimension)) * std::log(lambda);
}

BoundarySplit::BoundarySplit(Region region, double width) : region_(std::move(region)), width_(width) {}

bool BoundarySplit::is_boundary(std::span<const double> x) const {
    return region_.contains(x) && region_.distance_to_boundary(x, Norm::linf) <= width_;
}

bool BoundarySplit::is_interior(std::span<const double> x) const {
    return region_.contains(x) && region_.distance_to_boundary(x, Norm::linf) > width_;
}

BoundarySplit boundary_split(const Region& region, const LatticeParams& params) {
    if (!(params.lambda > 1.0)) {
        throw DomainError("boundary_split: lambda must exceed 1");
    }
    return BoundarySplit(region, params.boundary_width(region.dimension()));
}

double boundary_measure_1d(const Region& region, double width) {
    if (region.dimension() != 1) {
        throw DomainError("boundary_measure_1d: region must be one-dimensional");
    }
    std::vector<std::pair<double, double>> pieces;
    for (const auto& box : region.boxes()) {
        pieces.emplace_back(box.lower()[0], box.upper()[0]);
    }
    std::sort(pieces.begin(), pieces.end());
    double total = 0.0;
    double lo = pieces.front().first;
    double hi = pieces.front().second;
    auto flush = [&] { total += std::min(2.0 * width, hi - lo); };
    for (std::size_t i = 1; i < pieces.size(); ++i) {
        if (pieces[i].first <= hi) {
            hi = std::max(hi, pieces[i].second);
        } else {
            flush();
            lo = pieces[i].first;
            hi = pieces[i].second;
        }
    }
    flush();
    return total;
}

double boundary_measure_mc(const Region& region, double width, std::size_t samples, std::uint64_t seed) {
    if (samples == 0) {
        return 0.0;
    }
    const BoundarySplit split(region, width);
    const Box bbox = region.bounding_box();
    Philox4x32 engine(seed, StreamId{0, 0});
    std::vector<double> x(region.dimension());
    std::size_t hits = 0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            x[j] = bbox.lower()[j] + (bbox.upper()[j] - bbox.lower()[j]) * uniform01(engine);
        }
        if (split.is_boundary(x)) {
            ++hits;
        }
    }
    return bbox.volume() * static_cast<double>(hits) / static_cast<double>(samples);
}

// ---------------------------------------------------------------- cube lattices

namespace {

std::vector<Box> dilate(const Region& region, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("cube lattice: lambda must be positive");
    }
    if (!(region.volume() > 0.0)) {
        throw EmptyCoverError("cube lattice: region has zero volume");
    }
    const double factor = std::pow(lambda, 1.0 / static_cast<double>(region.dimension()));
    std::vector<Box> out;
    for (const auto& box : region.boxes()) {
        out.push_back(box.scaled(factor));
    }
    return out;
}

} // namespace

CubeCover covering(const Region& region, double lambda) {
    const std::size_t d = region.dimension();
    const auto boxes = dilate(region, lambda);
    std::set<std::vector<std::int64_t>> centers;
    std::vector<std::int64_t> first(d), last(d), z(d);
    for (const auto& box : boxes) {
        // Closed cube [z-1/2, z+1/2] meets the open box iff z+1/2 > lo and z-1/2 < hi.
        bool empty = false;
        for (std::size_t j = 0; j < d; ++j) {
            first[j] = static_cast<std::int64_t>(std::floor(box.lower()[j] - 0.5)) + 1;
            last[j] = static_cast<std::int64_t>(std::ceil(box.upper()[j] + 0.5)) - 1;
            empty = empty || last[j] < first[j];
        }
        if (empty) {
            continue;
        }
        z = first;
        while (true) {
            centers.insert(z);
            std::size_t j = 0;
            for (; j < d; ++j) {
                if (++z[j] <= last[j]) {
                    break;
                }
                z[j] = first[j];
            }
            if (j == d) {
                break;
            }
        }
    }
    CubeCover cover;
    cover.kind = CoverKind::covering;
    cover.centers.assign(centers.begin(), centers.end());
    return cover;
}

CubeCover packing(const Region& region, double lambda) {
    const std::size_t d = region.dimension();
    const auto boxes = dilate(region, lambda);
    const CubeCover candidates = covering(region, lambda);
    CubeCover cover;
    cover.kind = CoverKind::packing;
    std::vector<double> lo(d), hi(d);
    for (const auto& z : candidates.centers) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = static_cast<double>(z[j]) - 0.5;
            hi[j] = static_cast<double>(z[j]) + 0.5;
        }
        const Box cube(lo, hi);
        double covered = 0.0;
        for (const auto& box : boxes) {
            covered += box.intersection_volume(cube);
        }
        // The closed union contains the cube iff the uncovered part is null.
        if (covered >= 1.0 - 1e-12) {
            cover.centers.push_back(z);
        }
    }
    return cover;
}

} // namespace stabclt
