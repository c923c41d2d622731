#include "stabclt/statistics.hpp"

#include "stabclt/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace stabclt {

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw DomainError("least_squares: need at least two (x, y) pairs of matching length");
    }
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw DomainError("least_squares: abscissae are all equal");
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

std::vector<std::vector<double>> EstimatorSummary::correlation() const {
    const std::size_t m = components();
    std::vector<std::vector<double>> out(m, std::vector<double>(m, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            const double denom = std::sqrt(variance[i] * variance[j]);
            out[i][j] = denom > 0.0 ? covariance[i][j] / denom : 0.0;
        }
    }
    return out;
}

EstimatorSummary estimate_moments(std::span<const StatVector> samples) {
    if (samples.size() < 2) {
        throw DomainError("estimate_moments: need at least two samples");
    }
    const std::size_t m = samples.front().values.size();
    for (const auto& s : samples) {
        if (s.values.size() != m) {
            throw DomainError("estimate_moments: samples have differing lengths");
        }
    }
    const std::size_t count = samples.size();
    const double n = static_cast<double>(count);

    EstimatorSummary out;
    out.lambda = samples.front().lambda;
    out.count = count;
    out.mean.assign(m, 0.0);
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < m; ++i) {
            out.mean[i] += s.values[i];
        }
    }
    for (double& v : out.mean) {
        v /= n;
    }

    out.covariance.assign(m, std::vector<double>(m, 0.0));
    std::vector<double> fourth(m, 0.0);
    std::vector<double> centered(m);
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < m; ++i) {
            centered[i] = s.values[i] - out.mean[i];
        }
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i; j < m; ++j) {
                out.covariance[i][j] += centered[i] * centered[j];
            }
            const double sq = centered[i] * centered[i];
            fourth[i] += sq * sq;
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            out.covariance[i][j] /= n - 1.0;
            out.covariance[j][i] = out.covariance[i][j];
        }
    }

    out.variance.resize(m);
    out.se_mean.resize(m);
    out.se_variance.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double var = out.covariance[i][i];
        out.variance[i] = var;
        out.se_mean[i] = std::sqrt(var / n);
        // Var[s^2] ~ (mu_4 - (N - 3) / (N - 1) * sigma^4) / N
        const double mu4 = fourth[i] / n;
        const double var_of_var = (mu4 - (n - 3.0) / (n - 1.0) * var * var) / n;
        out.se_variance[i] = std::sqrt(std::max(var_of_var, 0.0));
    }

    const double lambda = out.lambda;
    for (std::size_t i = 0; i < m; ++i) {
        out.scaled_mean.push_back(out.mean[i] / lambda);
        out.scaled_variance.push_back(out.variance[i] / lambda);
        out.se_scaled_mean.push_back(out.se_mean[i] / lambda);
        out.se_scaled_variance.push_back(out.se_variance[i] / lambda);
    }
    return out;
}

std::vector<StatVector> standardize(std::span<const StatVector> samples, const EstimatorSummary& summary) {
    const std::size_t m = summary.components();
    std::vector<double> sd(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (!(summary.variance[i] > 0.0)) {
            throw DegenerateComponentError("standardize: component " + std::to_string(i) +
                                           " has zero variance");
        }
        sd[i] = std::sqrt(summary.variance[i]);
    }
    std::vector<StatVector> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        if (s.values.size() != m) {
            throw DomainError("standardize: sample length does not match the summary");
        }
        StatVector z = s;
        for (std::size_t i = 0; i < m; ++i) {
            z.values[i] = (s.values[i] - summary.mean[i]) / sd[i];
        }
        out.push_back(std::move(z));
    }
    return out;
}

double ks_to_normal(std::span<const double> values) {
    if (values.empty()) {
        throw DomainError("ks_to_normal: no values");
    }
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double sup = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double phi = normal_cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - phi;
        const double below = phi - static_cast<double>(i) / n;
        sup = std::max({sup, above, below});
    }
    return std::min(sup, 1.0);
}

std::vector<double> component(std::span<const StatVector> samples, std::size_t i) {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        out.push_back(s.values.at(i));
    }
    return out;
}

std::vector<double> default_t_grid() {
    std::vector<double> grid;
    for (int i = -6; i <= 6; ++i) {
        grid.push_back(0.5 * i);
    }
    return grid;
}

DiscrepancyResult product_form_discrepancy(std::span<const StatVector> standardized,
                                           std::span<const double> t_grid, std::size_t budget) {
    if (t_grid.empty()) {
        throw DomainError("product_form_discrepancy: empty threshold grid");
    }
    if (standardized.empty()) {
        throw DomainError("product_form_discrepancy: no samples");
    }
    std::vector<double> grid(t_grid.begin(), t_grid.end());
    std::sort(grid.begin(), grid.end());
    const std::size_t m = standardized.front().values.size();
    const std::size_t g = grid.size();

    double nodes = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        nodes *= static_cast<double>(g);
    }
    if (static_cast<double>(m) * nodes > static_cast<double>(budget)) {
        std::ostringstream msg;
        msg << "product_form_discrepancy: " << m << " components on a " << g
            << "-point grid exceed the node budget " << budget << "; use a coarser grid";
        throw GridTooLargeError(msg.str());
    }

    // Histogram over (g + 1)^m bins: bin a_i is the first grid index with
    // t >= z_i (g when z_i exceeds the grid), then prefix sums along every axis.
    const std::size_t side = g + 1;
    std::vector<std::size_t> stride(m);
    std::size_t cells = 1;
    for (std::size_t i = 0; i < m; ++i) {
        stride[i] = cells;
        cells *= side;
    }
    std::vector<double> hist(cells, 0.0);
    for (const auto& s : standardized) {
        if (s.values.size() != m) {
            throw DomainError("product_form_discrepancy: samples have differing lengths");
        }
        std::size_t cell = 0;
        for (std::size_t i = 0; i < m; ++i) {
            const auto a = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), s.values[i]) -
                                                    grid.begin());
            cell += a * stride[i];
        }
        hist[cell] += 1.0;
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t c = 0; c < cells; ++c) {
            if ((c / stride[i]) % side != 0) {
                hist[c] += hist[c - stride[i]];
            }
        }
    }

    const double n = static_cast<double>(standardized.size());
    DiscrepancyResult out;
    out.argmax.assign(m, grid.front());
    std::vector<std::size_t> node(m, 0);
    while (true) {
        std::size_t cell = 0;
        double product = 1.0;
        for (std::size_t i = 0; i < m; ++i) {
            cell += node[i] * stride[i];
            product *= normal_cdf(grid[node[i]]);
        }
        const double diff = std::fabs(hist[cell] / n - product);
        if (diff > out.sup) {
            out.sup = diff;
            for (std::size_t i = 0; i < m; ++i) {
                out.argmax[i] = grid[node[i]];
            }
        }
        std::size_t i = 0;
        for (; i < m; ++i) {
            if (++node[i] < g) {
                break;
            }
            node[i] = 0;
        }
        if (i == m) {
            break;
        }
    }
    return out;
}

RateFit fit_rate(std::span<const double> lambdas, std::span<const double> discrepancies, double noise_floor) {
    if (lambdas.size() != discrepancies.size()) {
        throw DomainError("fit_rate: lambda and discrepancy lists differ in length");
    }
    RateFit out;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double lambda = lambdas[i];
        const double d = discrepancies[i];
        if (!(lambda > 0.0)) {
            throw DomainError("fit_rate: lambda values must be positive");
        }
        std::ostringstream msg;
        msg.precision(6);
        if (!(d > 0.0)) {
            msg << "dropped lambda=" << lambda << ": zero discrepancy";
            out.warnings.push_back(msg.str());
            continue;
        }
        if (d < noise_floor) {
            msg << "dropped lambda=" << lambda << ": discrepancy " << d << " below noise floor " << noise_floor;
            out.warnings.push_back(msg.str());
            continue;
        }
        out.lambdas.push_back(lambda);
        x.push_back(std::log(lambda));
        y.push_back(std::log(d));
    }
    if (x.size() < 3) {
        throw DomainError("fit_rate: fewer than three usable (lambda, discrepancy) pairs");
    }
    const LinearFit fit = least_squares(x, y);
    out.slope = fit.slope;
    out.intercept = fit.intercept;
    out.r_squared = fit.r_squared;
    return out;
}

} // namespace stabclt
