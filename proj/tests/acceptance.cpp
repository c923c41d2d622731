// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Usage: acceptance [criterion-number ...]

#include "cli/report.hpp"
#include "oracles.hpp"
#include "random_regions.hpp"

#include "stabclt/stabclt.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

using namespace stabclt;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof buf, format, args);
    va_end(args);
    return buf;
}

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// Shared single-interval runs; criteria 2, 3 and 8 read the same replicates.
const EstimatorSummary& unit_interval(double alpha, ProcessKind process) {
    // deque: references handed out earlier must survive later insertions.
    static std::deque<std::tuple<double, ProcessKind, EstimatorSummary>> cache;
    for (const auto& [a, p, s] : cache) {
        if (a == alpha && p == process) {
            return s;
        }
    }
    const std::vector<double> kappa = {1.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0)};
    auto plan = theorem42_plan(WeightExponent{alpha}, kappa, intervals, {2000.0}, 20000, 20240601);
    plan.process = process;
    cache.emplace_back(alpha, process, estimate_moments(run_replicates(plan, 2000.0)));
    return std::get<2>(cache.back());
}

constexpr double kAlpha2Target = 85.0 / 108.0 + 0.25;

Outcome table_constants() {
    const double exact_v[] = {1.0 / 6.0, 85.0 / 108.0, 149.0 / 18.0, 135793.0 / 972.0};
    double worst_v = 0.0;
    for (int a = 1; a <= 4; ++a) {
        worst_v = std::max(worst_v, rel_err(v_alpha(WeightExponent{double(a)}), exact_v[a - 1]));
    }
    const double half_closed = 0.5 + std::sqrt(2.0) * std::asin(1.0 / std::sqrt(3.0)) - 13.0 * std::numbers::pi / 32.0;
    const double half_err = std::fabs(v_alpha(WeightExponent{0.5}) - half_closed);
    const double alphas[] = {0.5, 1.0, 2.0, 3.0, 4.0};
    const double exact_d2[] = {std::numbers::pi / 32.0, 0.0, 0.25, 2.25, 20.25};
    double worst_d2 = 0.0;
    for (int i = 0; i < 5; ++i) {
        const double d = delta_alpha(WeightExponent{alphas[i]});
        const double err = exact_d2[i] == 0.0 ? std::fabs(d * d) : rel_err(d * d, exact_d2[i]);
        worst_d2 = std::max(worst_d2, err);
    }
    return {worst_v <= 1e-12 && half_err <= 1e-9 && worst_d2 <= 1e-12,
            fmt("max rel err V %.1e (tol 1e-12), |V_1/2 - closed form| %.1e (tol 1e-9), max err delta^2 %.1e (tol 1e-12)",
                worst_v, half_err, worst_d2)};
}

Outcome mean_alpha1() {
    const auto& s = unit_interval(1.0, ProcessKind::poisson);
    const double gap = std::fabs(s.scaled_mean[0] - 0.5);
    return {gap <= 0.005 && 0.005 >= 3.0 * s.se_scaled_mean[0],
            fmt("E[L^1] = %.6f (SE %.1e), target 0.5 +- 0.005, N=%zu, lambda=2000", s.scaled_mean[0],
                s.se_scaled_mean[0], s.count)};
}

Outcome variance() {
    const auto& one = unit_interval(1.0, ProcessKind::poisson);
    const auto& two = unit_interval(2.0, ProcessKind::poisson);
    const double gap1 = std::fabs(one.scaled_variance[0] - 1.0 / 6.0);
    const double gap2 = std::fabs(two.scaled_variance[0] - kAlpha2Target);
    return {gap1 <= 0.01 && gap2 <= 3.0 * two.se_scaled_variance[0],
            fmt("lambda Var[L^1] = %.5f (target 1/6 +- 0.01); lambda^3 Var[L^2] = %.4f vs %.4f +- 3x%.4f", 
                one.scaled_variance[0], two.scaled_variance[0], kAlpha2Target, two.se_scaled_variance[0])};
}

Outcome joint_normality() {
    const std::vector<double> kappa = {1.0, 1.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0), Box::interval(2.0, 3.0)};
    const auto plan = theorem42_plan(WeightExponent{1.0}, kappa, intervals, {2000.0}, 10000, 777);
    const auto samples = run_replicates(plan, 2000.0);
    const auto level = summarise_level(plan, samples);
    const double corr = level.summary.correlation()[0][1];
    return {level.joint.sup <= 0.02 && std::fabs(corr) <= 0.04,
            fmt("sup discrepancy %.4f (tol 0.02), corr %.4f (tol 0.04), N=10000", level.joint.sup, corr)};
}

Outcome rate() {
    // alpha = 3: at alpha = 1 the discrepancy is already at the Monte Carlo floor for lambda = 100.
    const std::vector<double> kappa = {1.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0)};
    const auto report = theorem42_experiment(WeightExponent{3.0}, kappa, intervals, {100.0, 400.0, 1600.0, 6400.0},
                                             20000, 31337);
    std::string ds;
    for (const auto& level : report.levels) {
        ds += fmt("%s%.4f", ds.empty() ? "" : " ", level.joint.sup);
    }
    if (!report.rate) {
        return {false, "no rate fit: D = " + ds};
    }
    const double slope = report.rate->slope;
    return {slope >= -0.8 && slope <= -0.2,
            fmt("alpha=3 slope %.3f in [-0.8, -0.2], R^2 %.3f, D = %s, %zu levels fitted", slope,
                report.rate->r_squared, ds.c_str(), report.rate->lambdas.size())};
}

Outcome stabilization() {
    const auto density = DensitySpec::homogeneous(Region::interval(0.0, 1.0));
    ProbeOptions options;
    options.probe_count = 500;
    const FunctionalSpec spec{Family::nn_directed, 1, WeightExponent{1.0}, 1000.0};
    const auto result = stabilization_probe(density, 1000.0, spec, options, 99);
    bool monotone = true;
    for (std::size_t i = 1; i < result.tail_probs.size(); ++i) {
        monotone = monotone && result.tail_probs[i] <= result.tail_probs[i - 1];
    }
    return {result.decay_slope < 0.0 && result.r_squared >= 0.9 && monotone,
            fmt("tail slope %.3f, R^2 %.3f over %zu points, tail nonincreasing: %s", result.decay_slope,
                result.r_squared, result.fitted_points, monotone ? "yes" : "no")};
}

Outcome exp2_moments() {
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    const Box window = Box::interval(0.0, 1000.0);
    for (std::uint64_t w = 0; w < 200; ++w) {
        const auto line = sample_homogeneous_line(1.0, window, 4242, StreamId{w, 0});
        const auto d = NeighborIndex(line).nn_distances();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const double x = line.point(i)[0];
            if (x > 10.0 && x < 990.0) {
                sum += d[i];
                sum_sq += d[i] * d[i];
                ++n;
            }
        }
    }
    const double m1 = sum / n, m2 = sum_sq / n;
    return {rel_err(m1, 0.5) <= 0.02 && rel_err(m2, 0.5) <= 0.02,
            fmt("E[D] = %.5f, E[D^2] = %.5f (targets 0.5 +- 2%%), %zu interior points in 200 windows", m1, m2, n)};
}

Outcome poisson_vs_binomial() {
    const auto& p1 = unit_interval(1.0, ProcessKind::poisson);
    const auto& b1 = unit_interval(1.0, ProcessKind::binomial);
    const auto& p2 = unit_interval(2.0, ProcessKind::poisson);
    const auto& b2 = unit_interval(2.0, ProcessKind::binomial);
    const double se1 = std::hypot(p1.se_scaled_variance[0], b1.se_scaled_variance[0]);
    const double se2 = std::hypot(p2.se_scaled_variance[0], b2.se_scaled_variance[0]);
    const double diff1 = p1.scaled_variance[0] - b1.scaled_variance[0];
    const double diff2 = p2.scaled_variance[0] - b2.scaled_variance[0];
    return {std::fabs(diff1) <= 3.0 * se1 && std::fabs(diff2 - 0.25) <= 3.0 * se2,
            fmt("alpha=1: P-B = %.5f (3 SE %.5f); alpha=2: P-B = %.4f vs 0.25 (3 SE %.4f)", diff1, 3.0 * se1, diff2,
                3.0 * se2)};
}

Outcome neighbor_oracle() {
    std::size_t instances = 0, mismatches = 0;
    std::mt19937_64 pick(5);
    for (std::size_t d = 1; d <= 3; ++d) {
        const Region cube({Box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0))});
        for (std::size_t n : {50u, 500u, 2000u}) {
            for (std::uint64_t t = 0; t < 100; ++t) {
                const auto config = sample_binomial(cube, n, 1000 * d + n, StreamId{t, 0});
                const std::size_t k = 1 + pick() % 5;
                const NeighborIndex index(config);
                for (std::size_t i = 0; i < n; ++i) {
                    if (index.nearest(i, k) != oracle::brute_knn(config, i, k)) {
                        ++mismatches;
                        break;
                    }
                }
                ++instances;
            }
        }
    }
    return {mismatches == 0, fmt("%zu of %zu instances differ from brute force (d in 1..3, n in {50,500,2000})",
                                 mismatches, instances)};
}

Outcome sandwich() {
    std::mt19937_64 rng(10);
    std::size_t violations = 0, checks = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 3;
        const Region r = oracle::random_union(rng, d);
        for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
            const double scaled = lambda * r.volume();
            const double m = static_cast<double>(packing(r, lambda).count());
            const double n = static_cast<double>(covering(r, lambda).count());
            violations += (m <= scaled && scaled <= n) ? 0 : 1;
            ++checks;
        }
    }
    const Region unit = Region::interval(0.0, 1.0);
    const bool hand = covering(unit, 1.0).count() == 2 && packing(unit, 1.0).count() == 0 &&
                      covering(unit, 4.0).count() == 5 && packing(unit, 4.0).count() == 3;
    return {violations == 0 && hand,
            fmt("%zu violations in %zu (union, lambda) pairs; (0,1) counts at lambda 1, 4: %s", violations, checks,
                hand ? "n=2 m=0, n=5 m=3" : "MISMATCH")};
}

Outcome determinism() {
    const std::vector<double> kappa = {1.0, 2.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0), Box::interval(1.5, 2.5)};
    const std::vector<double> grid = {100.0, 400.0, 1600.0};
    std::string dumps[2];
    const std::size_t workers[] = {1, 8};
    for (int i = 0; i < 2; ++i) {
        const auto plan = theorem42_plan(WeightExponent{1.5}, kappa, intervals, grid, 2000, 8888);
        const auto report = run_experiment(plan, workers[i]);
        dumps[i] = cli::experiment_payload(report, plan).dump();
    }
    return {dumps[0] == dumps[1],
            fmt("report payloads (%zu bytes) %s across 1 and 8 workers", dumps[0].size(),
                dumps[0] == dumps[1] ? "identical" : "DIFFER")};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"Table 1 constants", table_constants},
        {"mean of L^1, alpha=1", mean_alpha1},
        {"scaled variances, alpha=1 and 2", variance},
        {"joint normality, two intervals", joint_normality},
        {"discrepancy rate band", rate},
        {"exponential stabilization tail", stabilization},
        {"Exp(2) NN moments", exp2_moments},
        {"Poisson vs binomial variance", poisson_vs_binomial},
        {"kNN search vs brute force", neighbor_oracle},
        {"covering/packing sandwich", sandwich},
        {"determinism across workers", determinism},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) {
        const long c = std::strtol(argv[i], nullptr, 10);
        if (c < 1 || c > static_cast<long>(criteria.size())) {
            std::fprintf(stderr, "usage: %s [criterion 1..%zu ...]\n", argv[0], criteria.size());
            return 2;
        }
        selected.insert(static_cast<std::size_t>(c));
    }

    std::size_t failed = 0, run = 0;
    for (std::size_t c = 1; c <= criteria.size(); ++c) {
        if (!selected.empty() && !selected.count(c)) {
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[c - 1].second();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %2zu  %-34s %s [%.1fs]\n", outcome.pass ? "PASS" : "FAIL", c, criteria[c - 1].first,
                    outcome.detail.c_str(), secs);
        std::fflush(stdout);
        failed += outcome.pass ? 0 : 1;
        ++run;
    }
    std::printf("%zu/%zu criteria passed\n", run - failed, run);
    return failed == 0 ? 0 : 1;
}
