#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "stabclt/errors.hpp"
#include "stabclt/functionals.hpp"
#include "stabclt/point_process.hpp"
#include "stabclt/rng.hpp"
#include "stat_oracles.hpp"

#include <array>
#include <cmath>
#include <thread>

using namespace stabclt;

namespace {

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v) {
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

const DensitySpec kUnit = DensitySpec::homogeneous(Region::interval(0.0, 1.0));

} // namespace

TEST_CASE("philox known-answer vectors") {
    using B = Philox4x32::Block;
    using K = Philox4x32::Key;
    CHECK(Philox4x32::encrypt(B{0, 0, 0, 0}, K{0, 0}) == B{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32::encrypt(B{0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, K{0xffffffffu, 0xffffffffu}) ==
          B{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32::encrypt(B{0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, K{0xa4093822u, 0x299f31d0u}) ==
          B{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are addressable and repeatable") {
    Philox4x32 a(42, {3, 0}), b(42, {3, 0}), c(42, {4, 0}), d(42, {3, 1});
    bool differs_c = false, differs_d = false;
    for (int i = 0; i < 16; ++i) {
        const auto x = a();
        CHECK(x == b());
        differs_c = differs_c || x != c();
        differs_d = differs_d || x != d();
    }
    CHECK(differs_c);
    CHECK(differs_d);
}

TEST_CASE("poisson variates have the right first two moments") {
    for (double mean : {0.3, 4.0, 9.99, 10.0, 37.5, 1000.0}) {
        Philox4x32 engine(5, {static_cast<std::uint64_t>(mean * 100), 0});
        std::vector<double> draws(100000);
        for (auto& x : draws) {
            x = static_cast<double>(poisson(engine, mean));
        }
        const double se = std::sqrt(mean / draws.size());
        CHECK_MESSAGE(std::fabs(mean_of(draws) - mean) < 4.0 * se, "mean " << mean);
        CHECK_MESSAGE(var_of(draws) / mean == doctest::Approx(1.0).epsilon(0.03), "mean " << mean);
    }
    Philox4x32 engine(1, {});
    CHECK(poisson(engine, 0.0) == 0);
    CHECK_THROWS_AS((void)poisson(engine, -1.0), DomainError);
}

TEST_CASE("rejection sampler matches the Poisson pmf") {
    const double mean = 15.0;
    Philox4x32 engine(77, {1, 0});
    const int n = 200000;
    std::array<double, 40> observed{};
    for (int i = 0; i < n; ++i) {
        observed[std::min<std::uint64_t>(poisson(engine, mean), 39)] += 1.0;
    }
    double chi2 = 0.0;
    int bins = 0;
    double tail = 1.0;
    for (int k = 0; k < 39; ++k) {
        const double p = std::exp(-mean + k * std::log(mean) - std::lgamma(k + 1.0));
        tail -= p;
        const double e = p * n;
        if (e >= 5.0) {
            chi2 += (observed[k] - e) * (observed[k] - e) / e;
            ++bins;
        }
    }
    // 0.001 critical value of chi-square with ~25 degrees of freedom is 52.6.
    CHECK(bins >= 20);
    CHECK(chi2 < 52.6);
}

TEST_CASE("sample_poisson edge cases and determinism") {
    const auto empty = sample_poisson(DensitySpec::intensity(Region::interval(0.0, 1.0), {0.0}) , 5.0, 1, {0, 0});
    CHECK(empty.empty());
    const auto a = sample_poisson(kUnit, 500.0, 99, {17, 0});
    const auto b = sample_poisson(kUnit, 500.0, 99, {17, 0});
    CHECK(a == b);
    CHECK(a.seed() == 99);
    CHECK(a.stream() == StreamId{17, 0});
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(kUnit.support().contains(a.point(i)));
    }
}

TEST_CASE("sampling is unaffected by concurrent streams") {
    const auto reference = sample_poisson(kUnit, 300.0, 8, {5, 0});
    std::vector<PointConfiguration> results(8, PointConfiguration(1));
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < 8; ++t) {
            pool.emplace_back([&, t] { results[t] = sample_poisson(kUnit, 300.0, 8, {t == 3 ? 5 : 100 + t, 0}); });
        }
    }
    CHECK(results[3] == reference);
}

TEST_CASE("counts have Poisson mean and dispersion") {
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        counts.push_back(static_cast<double>(sample_poisson(kUnit, 1000.0, s, {0, 0}).size()));
    }
    CHECK(std::fabs(mean_of(counts) - 1000.0) <= 3.0);
    const double dispersion = var_of(counts) / mean_of(counts);
    CHECK(dispersion >= 0.9);
    CHECK(dispersion <= 1.1);
}

TEST_CASE("distinct streams give independent counts") {
    // 6 x 6 contingency table of (count in stream 2i, count in stream 2i+1), mean 2.
    std::array<std::array<double, 6>, 6> table{};
    const int n = 10000;
    const auto density = DensitySpec::intensity(Region::interval(0.0, 1.0), {2.0});
    for (int i = 0; i < n; ++i) {
        const auto a = std::min<std::size_t>(sample_poisson(density, 1.0, 21, {2ull * i, 0}).size(), 5);
        const auto b = std::min<std::size_t>(sample_poisson(density, 1.0, 21, {2ull * i + 1, 0}).size(), 5);
        table[a][b] += 1.0;
    }
    std::array<double, 6> rows{}, cols{};
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            rows[a] += table[a][b];
            cols[b] += table[a][b];
        }
    }
    double chi2 = 0.0;
    for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
            const double e = rows[a] * cols[b] / n;
            chi2 += (table[a][b] - e) * (table[a][b] - e) / e;
        }
    }
    // 25 degrees of freedom, 0.001 level.
    CHECK(chi2 < 52.62);
}

TEST_CASE("splitting the support leaves the law unchanged") {
    const auto split = DensitySpec::probability(Region({Box::interval(0.0, 0.5), Box::interval(0.5, 1.0)}), {1.0, 1.0});
    std::vector<double> counts_a, counts_b, coords_a, coords_b;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        const auto a = sample_poisson(kUnit, 20.0, 3, {r, 0});
        const auto b = sample_poisson(split, 20.0, 4, {r, 0});
        counts_a.push_back(static_cast<double>(a.size()));
        counts_b.push_back(static_cast<double>(b.size()));
        if (coords_a.size() < 10000) {
            coords_a.insert(coords_a.end(), a.coordinates().begin(), a.coordinates().end());
        }
        if (coords_b.size() < 10000) {
            coords_b.insert(coords_b.end(), b.coordinates().begin(), b.coordinates().end());
        }
    }
    CHECK(oracle::ks_two_sample_pvalue(counts_a, counts_b) > 0.001);
    CHECK(oracle::ks_two_sample_pvalue(coords_a, coords_b) > 0.001);
}

TEST_CASE("binomial process") {
    const Region unit = Region::interval(0.0, 1.0);
    const auto one = sample_binomial(unit, 1, 1, {});
    REQUIRE(one.size() == 1);
    CHECK(unit.contains(one.point(0)));
    CHECK(sample_binomial(unit, 0, 1, {}).empty());

    const auto many = sample_binomial(unit, 100000, 2, {});
    CHECK(std::fabs(mean_of(many.coordinates()) - 0.5) <= 0.003);

    const Region two({Box::interval(0.0, 1.0), Box::interval(2.0, 3.0)});
    const auto split = sample_binomial(two, 100000, 3, {});
    double first = 0.0;
    for (double x : split.coordinates()) {
        first += x < 1.0 ? 1.0 : 0.0;
    }
    CHECK(std::fabs(first / 100000.0 - 0.5) <= 0.005);
}

TEST_CASE("homogeneous line process") {
    std::vector<double> c1, c20;
    for (std::uint64_t s = 0; s < 4000; ++s) {
        c1.push_back(static_cast<double>(sample_homogeneous_line(1.0, Box::interval(0.0, 1.0), s, {}).size()));
        c20.push_back(static_cast<double>(sample_homogeneous_line(2.0, Box::interval(0.0, 10.0), s, {}).size()));
    }
    CHECK(mean_of(c1) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(mean_of(c20) == doctest::Approx(20.0).epsilon(0.01));
    CHECK_THROWS_AS((void)sample_homogeneous_line(1.0, Box({0.0, 0.0}, {1.0, 1.0}), 0, {}), DomainError);
}

TEST_CASE("interior nearest-neighbour gaps have mean one half") {
    std::vector<double> gaps;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto line = sample_homogeneous_line(1.0, Box::interval(0.0, 1000.0), 11, {s, 0});
        const NeighborIndex index(line);
        const auto d = index.nn_distances();
        for (std::size_t i = 0; i < line.size(); ++i) {
            const double x = line.point(i)[0];
            if (x > 10.0 && x < 990.0) {
                gaps.push_back(d[i]);
            }
        }
    }
    CHECK(mean_of(gaps) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("density validation") {
    const Region unit = Region::interval(0.0, 1.0);
    CHECK_THROWS_AS(DensitySpec::probability(unit, {2.0}), ConfigurationError);
    CHECK(DensitySpec::intensity(unit, {0.0}).integral() == 0.0);
    CHECK_THROWS_AS((void)sample_binomial(DensitySpec::intensity(unit, {0.0}), 1, 1, {0, 0}), DomainError);
    CHECK_THROWS_AS(DensitySpec::intensity(unit, {-1.0}), ConfigurationError);
    CHECK_THROWS_AS(DensitySpec::intensity(unit, {1.0, 2.0}), ConfigurationError);
    const auto h = DensitySpec::homogeneous(Region({Box::interval(0.0, 1.0), Box::interval(2.0, 5.0)}));
    CHECK(h.integral() == doctest::Approx(1.0));
    CHECK(h.sup_norm() == doctest::Approx(0.25));
    CHECK(h.integral_over(Region::interval(0.5, 2.5)) == doctest::Approx(0.25));
}
