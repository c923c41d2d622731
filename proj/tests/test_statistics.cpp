#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stabclt/errors.hpp"
#include "stabclt/experiments.hpp"
#include "stabclt/statistics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

using namespace stabclt;

namespace {

std::vector<StatVector> wrap(const std::vector<std::vector<double>>& rows) {
    std::vector<StatVector> out;
    for (const auto& r : rows) {
        out.push_back(StatVector{r, 1.0, {}});
    }
    return out;
}

std::vector<StatVector> normals(std::size_t n, std::size_t m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<StatVector> out(n);
    for (auto& s : out) {
        s.values.resize(m);
        for (auto& v : s.values) {
            v = z(rng);
        }
    }
    return out;
}

ExperimentPlan small_plan(std::size_t replicates) {
    const std::vector<double> kappa = {1.0, 2.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0), Box::interval(2.0, 3.0)};
    return theorem42_plan(WeightExponent{1.0}, kappa, intervals, {50.0, 100.0, 200.0}, replicates, 77);
}

} // namespace

TEST_CASE("estimate_moments examples") {
    const auto two = estimate_moments(wrap({{0.0}, {2.0}}));
    CHECK(two.mean[0] == 1.0);
    CHECK(two.variance[0] == 2.0);
    CHECK(two.se_mean[0] == 1.0);

    const auto constant = estimate_moments(wrap({{3.0, 1.0}, {3.0, 1.0}, {3.0, 1.0}}));
    CHECK(constant.variance[0] == 0.0);
    CHECK(constant.covariance[0][1] == 0.0);

    CHECK_THROWS_AS((void)estimate_moments(wrap({{1.0}})), DomainError);
    CHECK_THROWS_AS((void)estimate_moments(wrap({{1.0}, {1.0, 2.0}})), DomainError);

    const auto draws = normals(100000, 1, 1);
    const auto s = estimate_moments(draws);
    CHECK(std::abs(s.mean[0]) <= 0.01);
    CHECK(std::abs(s.variance[0] - 1.0) <= 0.02);
    // Var of the sample variance of N(0,1) is about 2/N.
    CHECK(s.se_variance[0] == doctest::Approx(std::sqrt(2.0 / 100000)).epsilon(0.05));
}

TEST_CASE("scaled estimates divide by lambda") {
    auto samples = wrap({{1.0}, {3.0}, {8.0}});
    for (auto& s : samples) {
        s.lambda = 4.0;
    }
    const auto summary = estimate_moments(samples);
    CHECK(summary.lambda == 4.0);
    CHECK(summary.scaled_mean[0] == summary.mean[0] / 4.0);
    CHECK(summary.scaled_variance[0] == summary.variance[0] / 4.0);
    CHECK(summary.se_scaled_variance[0] == summary.se_variance[0] / 4.0);
}

TEST_CASE("covariance is symmetric PSD with the variance on its diagonal") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + trial % 4;
        std::vector<std::vector<double>> rows(5 + trial);
        for (auto& r : rows) {
            const double shared = z(rng);
            for (std::size_t i = 0; i < m; ++i) {
                r.push_back(shared + (trial % 3) * z(rng));
            }
        }
        const auto s = estimate_moments(wrap(rows));
        Eigen::MatrixXd c(m, m);
        for (std::size_t i = 0; i < m; ++i) {
            CHECK(s.covariance[i][i] == s.variance[i]);
            for (std::size_t j = 0; j < m; ++j) {
                CHECK(s.covariance[i][j] == s.covariance[j][i]);
                c(i, j) = s.covariance[i][j];
            }
        }
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
        CHECK(eig.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("standardize") {
    CHECK_THROWS_AS((void)standardize(wrap({{1.0, 0.0}, {1.0, 1.0}}),
                                      estimate_moments(wrap({{1.0, 0.0}, {1.0, 1.0}}))),
                    DegenerateComponentError);

    const auto samples = normals(500, 3, 4);
    auto shifted = samples;
    for (auto& s : shifted) {
        s.values[1] = 5.0 + 3.0 * s.values[1];
    }
    const auto summary = estimate_moments(shifted);
    const auto z = standardize(shifted, summary);
    const auto zs = estimate_moments(z);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(zs.mean[i]) <= 1e-12);
        CHECK(zs.variance[i] == doctest::Approx(1.0).epsilon(1e-12));
    }

    const std::vector<StatVector> one = {StatVector{{summary.mean[0] + std::sqrt(summary.variance[0]), 0.0, 0.0}, 1.0, {}}};
    CHECK(standardize(one, summary)[0].values[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ks_to_normal") {
    CHECK(ks_to_normal(std::vector<double>(10, 0.0)) == 0.5);
    CHECK(ks_to_normal(std::vector<double>{0.0}) == 0.5);
    CHECK_THROWS_AS((void)ks_to_normal(std::vector<double>{}), DomainError);
    const auto draws = component(normals(100000, 1, 9), 0);
    CHECK(ks_to_normal(draws) <= 0.01);
    // Shifted sample: KS near Phi(0.25) - Phi(-0.25).
    auto shifted = draws;
    for (auto& v : shifted) {
        v += 0.5;
    }
    CHECK(ks_to_normal(shifted) == doctest::Approx(normal_cdf(0.25) - normal_cdf(-0.25)).epsilon(0.05));
}

TEST_CASE("product-form discrepancy") {
    const auto grid = default_t_grid();
    REQUIRE(grid.size() == 13);
    CHECK(grid.front() == -3.0);
    CHECK(grid.back() == 3.0);

    CHECK(product_form_discrepancy(normals(100000, 2, 5), grid).sup <= 0.01);

    // Comonotone pair: at (0, 0) the joint CDF is 1/2 while the product is 1/4.
    std::vector<StatVector> pair;
    for (const auto& s : normals(20000, 1, 6)) {
        pair.push_back(StatVector{{s.values[0], s.values[0]}, 1.0, {}});
    }
    const std::vector<double> origin = {0.0};
    const auto at_origin = product_form_discrepancy(pair, origin);
    CHECK(at_origin.sup == doctest::Approx(0.25).epsilon(0.05));
    CHECK(at_origin.argmax == std::vector<double>{0.0, 0.0});

    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const auto one = normals(50 + seed, 1, seed);
        const auto d = product_form_discrepancy(one, grid).sup;
        CHECK(d <= ks_to_normal(component(one, 0)));
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);
    }

    CHECK_THROWS_AS((void)product_form_discrepancy(normals(10, 4, 1), grid), GridTooLargeError);
    CHECK_NOTHROW((void)product_form_discrepancy(normals(10, 4, 1), grid, 200000));
    CHECK_THROWS_AS((void)product_form_discrepancy(normals(10, 1, 1), std::vector<double>{}), DomainError);
}

TEST_CASE("fit_rate") {
    const std::vector<double> lambdas = {1e2, 1e3, 1e4};
    std::vector<double> power;
    for (double l : lambdas) {
        power.push_back(1.0 / std::sqrt(l));
    }
    const auto exact = fit_rate(lambdas, power);
    CHECK(exact.slope == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(exact.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact.warnings.empty());

    const auto flat = fit_rate(lambdas, std::vector<double>{0.3, 0.3, 0.3});
    CHECK(std::abs(flat.slope) <= 1e-12);

    const std::vector<double> four = {1e2, 1e3, 1e4, 1e5};
    const auto dropped = fit_rate(four, std::vector<double>{0.1, 0.03, 0.01, 0.0});
    CHECK(dropped.lambdas.size() == 3);
    CHECK(dropped.warnings.size() == 1);
    const auto floored = fit_rate(four, std::vector<double>{0.1, 0.03, 0.01, 0.004}, 0.005);
    CHECK(floored.lambdas == std::vector<double>{1e2, 1e3, 1e4});
    CHECK_THROWS_AS((void)fit_rate(lambdas, std::vector<double>{0.1, 0.0, 0.01}), DomainError);
}

TEST_CASE("plan validation") {
    auto plan = small_plan(4);
    CHECK_NOTHROW(plan.validate());
    plan.replicates = 1;
    CHECK_THROWS_AS(plan.validate(), ConfigurationError);
    plan = small_plan(4);
    plan.lambda_grid = {100.0, 50.0};
    CHECK_THROWS_AS(plan.validate(), ConfigurationError);
    plan = small_plan(4);
    plan.test_functions.push_back(TestFunctionSpec::indicator(Region::interval(0.5, 2.5)));
    CHECK_THROWS_AS(plan.validate(), ConfigurationError);
    CHECK(parse_process("binomial") == ProcessKind::binomial);
    CHECK_THROWS_AS((void)parse_process("cox"), ConfigurationError);
}

TEST_CASE("replicates are reproducible and independent of worker count") {
    const auto plan = small_plan(40);
    const auto serial = run_replicates(plan, 100.0, 1);
    REQUIRE(serial.size() == 40);
    const auto again = run_replicates(plan, 100.0, 1);
    const auto parallel = run_replicates(plan, 100.0, 8);
    for (std::size_t r = 0; r < serial.size(); ++r) {
        CHECK(serial[r].values == again[r].values);
        CHECK(serial[r].values == parallel[r].values);
    }
    CHECK(serial[0].values != serial[1].values);
    // Levels are seeded separately.
    CHECK(run_replicates(plan, 200.0, 1)[0].values != serial[0].values);
}

TEST_CASE("zero test function gives zero statistics") {
    auto plan = small_plan(5);
    for (auto& f : plan.test_functions) {
        f = TestFunctionSpec::piecewise(f.region(), std::vector<double>(f.region().boxes().size(), 0.0));
    }
    for (const auto& s : run_replicates(plan, 100.0, 2)) {
        CHECK(s.values == std::vector<double>{0.0, 0.0});
    }
}

TEST_CASE("insufficient points abort after retries") {
    const std::vector<double> kappa = {1.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0)};
    // A binomial process with lambda = 1 always holds a single point.
    auto plan = theorem42_plan(WeightExponent{1.0}, kappa, intervals, {1.0}, 3, 1);
    plan.process = ProcessKind::binomial;
    CHECK_THROWS_AS((void)run_replicates(plan, 1.0, 1), Error);
    // Tiny Poisson intensity: mostly empty configurations, which score zero.
    plan.process = ProcessKind::poisson;
    CHECK_NOTHROW((void)run_replicates(plan, 0.01, 1));
}

TEST_CASE("experiment report structure and targets") {
    const auto plan = small_plan(200);
    const auto report = run_experiment(plan, 2);
    REQUIRE(report.levels.size() == 3);
    // With N = 200 the discrepancies sit near the 1/sqrt(N) floor, so the fit may be skipped.
    CHECK((report.rate.has_value() || !report.warnings.empty()));
    for (const auto& level : report.levels) {
        REQUIRE(level.target_mean.size() == 2);
        // alpha = 1: the mean target 1/2 * |Gamma| does not depend on kappa.
        CHECK(*level.target_mean[0] == doctest::Approx(0.5));
        CHECK(*level.target_mean[1] == doctest::Approx(0.5));
        CHECK(*level.target_variance[0] == doctest::Approx(1.0 / 6.0));
        // kappa = 2 on the second interval: V_1 * 2^{-1} * |Gamma|.
        CHECK(*level.target_variance[1] == doctest::Approx(1.0 / 12.0));
        CHECK(level.joint.sup >= 0.0);
        CHECK(level.joint.sup <= 1.0);
        for (double k : level.ks) {
            CHECK(k >= 0.0);
            CHECK(k <= 1.0);
        }
    }

    auto binomial = plan;
    binomial.process = ProcessKind::binomial;
    LevelReport level;
    level.summary = estimate_moments(run_replicates(binomial, 100.0, 1));
    attach_targets(binomial, level);
    CHECK(level.target_mean[0].has_value());
    CHECK_FALSE(level.target_variance[0].has_value());
}

TEST_CASE("targets track non-unit intensity") {
    // kappa = 4, alpha = 2: NN distances shrink by 4, so lambda * E[L^2] -> 1/2 * 4^{-1}.
    const std::vector<double> kappa = {4.0};
    const std::vector<Box> intervals = {Box::interval(0.0, 1.0)};
    const auto plan = theorem42_plan(WeightExponent{2.0}, kappa, intervals, {500.0}, 400, 21);
    const auto report = run_experiment(plan, 1);
    const auto& level = report.levels.front();
    CHECK(*level.target_mean[0] == doctest::Approx(0.125));
    const double expected_var = 85.0 / 108.0 / 4.0 / 4.0 / 4.0 + 0.25 * 0.25 * 0.25;
    CHECK(*level.target_variance[0] == doctest::Approx(expected_var));
    CHECK(std::abs(level.summary.scaled_mean[0] - 0.125) <= 4.0 * level.summary.se_scaled_mean[0] + 0.005);
    CHECK(std::abs(level.summary.scaled_variance[0] - expected_var) <=
          4.0 * level.summary.se_scaled_variance[0] + 0.01);
}
