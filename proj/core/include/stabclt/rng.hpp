#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace stabclt {

/// Address of an independent random stream under a fixed 64-bit seed.
/// `substream` separates retries and auxiliary draws belonging to one stream.
struct StreamId {
    std::uint64_t stream = 0;
    std::uint32_t substream = 0;

    friend bool operator==(const StreamId&, const StreamId&) = default;
};

/// Philox4x32-10 counter-based generator.
///
/// The 64-bit seed is the key; the counter is (block, substream, stream), so
/// every (seed, stream, substream) triple addresses its own sequence of 2^32
/// blocks and no state is shared between streams. Satisfies
/// UniformRandomBitGenerator with 64-bit outputs.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, StreamId id) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept;

    /// The raw ten-round bijection, exposed for known-answer tests.
    static Block encrypt(Block counter, Key key) noexcept;

private:
    void refill() noexcept;

    Key key_;
    Block counter_;
    Block buffer_{};
    unsigned used_ = 4;
};

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Philox4x32& engine) noexcept {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Exponential variate with unit rate.
double standard_exponential(Philox4x32& engine) noexcept;

/// Poisson variate: sequential inversion below mean 10, transformed rejection
/// with squeeze (PTRS) above.
std::uint64_t poisson(Philox4x32& engine, double mean);

/// SplitMix64 finaliser, used to derive per-experiment seeds.
std::uint64_t mix64(std::uint64_t value) noexcept;

} // namespace stabclt
