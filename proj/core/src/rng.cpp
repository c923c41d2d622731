#include "stabclt/rng.hpp"

#include "stabclt/errors.hpp"

#include <cmath>

namespace stabclt {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

Philox4x32::Philox4x32(std::uint64_t seed, StreamId id) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      counter_{0u, id.substream, static_cast<std::uint32_t>(id.stream),
               static_cast<std::uint32_t>(id.stream >> 32)} {}

Philox4x32::Block Philox4x32::encrypt(Block ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

void Philox4x32::refill() noexcept {
    buffer_ = encrypt(counter_, key_);
    ++counter_[0];
    used_ = 0;
}

Philox4x32::result_type Philox4x32::operator()() noexcept {
    if (used_ >= 4) {
        refill();
    }
    const std::uint64_t lo = buffer_[used_];
    const std::uint64_t hi = buffer_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
}

double standard_exponential(Philox4x32& engine) noexcept {
    // 1 - U lies in (0, 1], so the log is finite.
    return -std::log1p(-uniform01(engine));
}

std::uint64_t poisson(Philox4x32& engine, double mean) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw DomainError("poisson: mean must be finite and >= 0");
    }
    if (mean == 0.0) {
        return 0;
    }
    if (mean < 10.0) {
        double p = std::exp(-mean);
        double cdf = p;
        const double u = uniform01(engine);
        std::uint64_t k = 0;
        while (u > cdf && k < 1000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    // Hormann (1993), "The transformed rejection method for generating Poisson
    // random variables".
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    while (true) {
        const double u = uniform01(engine) - 0.5;
        const double v = uniform01(engine);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) {
            return static_cast<std::uint64_t>(k);
        }
        if (k < 0.0 || (us < 0.013 && v > us)) {
            continue;
        }
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0)) {
            return static_cast<std::uint64_t>(k);
        }
    }
}

std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace stabclt
