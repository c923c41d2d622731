#include "stabclt/neighbors.hpp"

#include "stabclt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

namespace stabclt {

namespace {

bool closer(const Neighbor& a, const Neighbor& b) noexcept {
    return a.squared_distance < b.squared_distance ||
           (a.squared_distance == b.squared_distance && a.index < b.index);
}

[[noreturn]] void throw_insufficient(std::size_t found, std::size_t k) {
    throw InsufficientPointsError("neighbour search: requested " + std::to_string(k) +
                                  " neighbours but only " + std::to_string(found) +
                                  " other points are available");
}

/// Bounded max-heap keeping the k best candidates under `closer`.
class BestK {
public:
    explicit BestK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

    void offer(Neighbor n) {
        if (items_.size() < k_) {
            items_.push_back(n);
            std::push_heap(items_.begin(), items_.end(), closer);
        } else if (closer(n, items_.front())) {
            std::pop_heap(items_.begin(), items_.end(), closer);
            items_.back() = n;
            std::push_heap(items_.begin(), items_.end(), closer);
        }
    }

    [[nodiscard]] bool full() const noexcept { return items_.size() == k_; }
    [[nodiscard]] double worst() const noexcept { return items_.front().squared_distance; }

    std::vector<Neighbor> sorted() && {
        std::sort_heap(items_.begin(), items_.end(), closer);
        return std::move(items_);
    }

private:
    std::size_t k_;
    std::vector<Neighbor> items_;
};

} // namespace

NeighborIndex::NeighborIndex(const PointConfiguration& config) : config_(&config) {
    const std::size_t n = config.size();
    const std::size_t d = config.dimension();
    if (n == 0) {
        return;
    }
    if (d == 1) {
        sorted_index_.resize(n);
        std::iota(sorted_index_.begin(), sorted_index_.end(), std::size_t{0});
        const auto& c = config.coordinates();
        std::sort(sorted_index_.begin(), sorted_index_.end(), [&](std::size_t a, std::size_t b) {
            return c[a] < c[b] || (c[a] == c[b] && a < b);
        });
        sorted_coords_.resize(n);
        for (std::size_t p = 0; p < n; ++p) {
            sorted_coords_[p] = c[sorted_index_[p]];
        }
        return;
    }

    origin_.assign(d, std::numeric_limits<double>::infinity());
    std::vector<double> top(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = config.point(i);
        for (std::size_t j = 0; j < d; ++j) {
            origin_[j] = std::min(origin_[j], p[j]);
            top[j] = std::max(top[j], p[j]);
        }
    }
    double volume = 1.0;
    std::size_t spread_axes = 0;
    for (std::size_t j = 0; j < d; ++j) {
        const double extent = top[j] - origin_[j];
        if (extent > 0.0) {
            volume *= extent;
            ++spread_axes;
        }
    }
    cell_side_ = spread_axes == 0
                     ? 1.0
                     : std::pow(volume / static_cast<double>(n), 1.0 / static_cast<double>(spread_axes));
    if (!(cell_side_ > 0.0) || !std::isfinite(cell_side_)) {
        cell_side_ = 1.0;
    }

    auto layout = [&] {
        std::size_t total = 1;
        cells_per_axis_.assign(d, 1);
        cell_stride_.assign(d, 1);
        for (std::size_t j = 0; j < d; ++j) {
            const double cells = std::floor((top[j] - origin_[j]) / cell_side_) + 1.0;
            cells_per_axis_[j] = static_cast<std::size_t>(std::min(cells, 1e7));
            cell_stride_[j] = total;
            total *= cells_per_axis_[j];
        }
        return total;
    };
    std::size_t cells = layout();
    while (cells > 4 * n + 16) {
        cell_side_ *= 1.5;
        cells = layout();
    }

    std::vector<std::size_t> cell_of(n);
    cell_start_.assign(cells + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto p = config.point(i);
        std::size_t cell = 0;
        for (std::size_t j = 0; j < d; ++j) {
            cell += cell_coordinate(p[j], j) * cell_stride_[j];
        }
        cell_of[i] = cell;
        ++cell_start_[cell + 1];
    }
    std::partial_sum(cell_start_.begin(), cell_start_.end(), cell_start_.begin());
    cell_points_.resize(n);
    std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        cell_points_[fill[cell_of[i]]++] = i;
    }
}

std::size_t NeighborIndex::cell_coordinate(double v, std::size_t axis) const noexcept {
    const double t = std::floor((v - origin_[axis]) / cell_side_);
    if (!(t > 0.0)) {
        return 0;
    }
    return std::min(static_cast<std::size_t>(t), cells_per_axis_[axis] - 1);
}

template <typename Skip>
std::vector<Neighbor> NeighborIndex::search(std::span<const double> x, std::size_t k, Skip skip) const {
    if (k == 0) {
        return {};
    }
    if (x.size() != config_->dimension()) {
        throw ConfigurationError("neighbour search: query has wrong dimension");
    }
    if (config_->empty()) {
        throw_insufficient(0, k);
    }
    return config_->dimension() == 1 ? search_line(x[0], k, skip) : search_grid(x, k, skip);
}

template <typename Skip>
std::vector<Neighbor> NeighborIndex::search_line(double x, std::size_t k, Skip skip) const {
    const std::size_t n = sorted_coords_.size();
    const auto pos = static_cast<std::ptrdiff_t>(
        std::lower_bound(sorted_coords_.begin(), sorted_coords_.end(), x) - sorted_coords_.begin());
    std::ptrdiff_t left = pos - 1;
    auto right = static_cast<std::size_t>(pos);
    constexpr double inf = std::numeric_limits<double>::infinity();

    // Visit points in nondecreasing distance; once k are held, keep taking
    // points tied with the k-th so the index tie-break is exact.
    std::vector<Neighbor> found;
    double kth = inf;
    while (true) {
        const double dl = left >= 0 ? (x - sorted_coords_[static_cast<std::size_t>(left)]) *
                                          (x - sorted_coords_[static_cast<std::size_t>(left)])
                                    : inf;
        const double dr = right < n ? (x - sorted_coords_[right]) * (x - sorted_coords_[right]) : inf;
        const double next = std::min(dl, dr);
        if (next == inf || (found.size() >= k && next > kth)) {
            break;
        }
        std::size_t index;
        if (dl <= dr) {
            index = sorted_index_[static_cast<std::size_t>(left--)];
        } else {
            index = sorted_index_[right++];
        }
        if (skip(index)) {
            continue;
        }
        found.push_back({index, next});
        if (found.size() == k) {
            kth = next;
        }
    }
    if (found.size() < k) {
        throw_insufficient(found.size(), k);
    }
    std::sort(found.begin(), found.end(), closer);
    found.resize(k);
    return found;
}

template <typename Skip>
std::vector<Neighbor> NeighborIndex::search_grid(std::span<const double> x, std::size_t k, Skip skip) const {
    const std::size_t d = config_->dimension();
    std::vector<std::size_t> home(d);
    std::size_t max_ring = 0;
    for (std::size_t j = 0; j < d; ++j) {
        home[j] = cell_coordinate(x[j], j);
        max_ring = std::max({max_ring, home[j], cells_per_axis_[j] - 1 - home[j]});
    }

    BestK best(k);
    std::vector<std::size_t> lo(d), hi(d), cur(d);
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
        for (std::size_t j = 0; j < d; ++j) {
            lo[j] = home[j] >= ring ? home[j] - ring : 0;
            hi[j] = std::min(home[j] + ring, cells_per_axis_[j] - 1);
        }
        cur = lo;
        while (true) {
            bool on_shell = false;
            std::size_t cell = 0;
            for (std::size_t j = 0; j < d; ++j) {
                const std::size_t off = cur[j] > home[j] ? cur[j] - home[j] : home[j] - cur[j];
                on_shell = on_shell || off == ring;
                cell += cur[j] * cell_stride_[j];
            }
            if (on_shell) {
                for (std::size_t s = cell_start_[cell]; s < cell_start_[cell + 1]; ++s) {
                    const std::size_t index = cell_points_[s];
                    if (!skip(index)) {
                        best.offer({index, squared_distance(x, config_->point(index))});
                    }
                }
            }
            std::size_t j = 0;
            for (; j < d; ++j) {
                if (++cur[j] <= hi[j]) {
                    break;
                }
                cur[j] = lo[j];
            }
            if (j == d) {
                break;
            }
        }
        // Every point beyond this shell is at least ring * side away.
        const double reach = static_cast<double>(ring) * cell_side_;
        if (best.full() && best.worst() < reach * reach * (1.0 - 1e-9)) {
            break;
        }
    }
    if (!best.full()) {
        std::size_t available = 0;
        for (std::size_t i = 0; i < config_->size(); ++i) {
            available += skip(i) ? 0 : 1;
        }
        throw_insufficient(available, k);
    }
    return std::move(best).sorted();
}

std::vector<Neighbor> NeighborIndex::nearest(std::size_t i, std::size_t k) const {
    return search(config_->point(i), k, [i](std::size_t j) { return j == i; });
}

std::vector<Neighbor> NeighborIndex::nearest(std::span<const double> x, std::size_t k) const {
    const PointConfiguration& config = *config_;
    return search(x, k, [&config, x](std::size_t j) {
        const auto p = config.point(j);
        return std::equal(p.begin(), p.end(), x.begin());
    });
}

std::vector<double> NeighborIndex::nn_distances() const {
    const std::size_t n = config_->size();
    std::vector<double> out(n);
    if (n < 2) {
        throw_insufficient(n == 0 ? 0 : n - 1, 1);
    }
    if (config_->dimension() == 1) {
        for (std::size_t p = 0; p < n; ++p) {
            double best = std::numeric_limits<double>::infinity();
            if (p > 0) {
                best = sorted_coords_[p] - sorted_coords_[p - 1];
            }
            if (p + 1 < n) {
                best = std::min(best, sorted_coords_[p + 1] - sorted_coords_[p]);
            }
            out[sorted_index_[p]] = best;
        }
        return out;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::sqrt(nearest(i, 1).front().squared_distance);
    }
    return out;
}

} // namespace stabclt
