#pragma once

#include <cstdint>

namespace switchkit {

/// SplitMix64 finalizer (Stafford variant 13).
std::uint64_t mix64(std::uint64_t x);

/**
 * Counter-based random stream. Draw i of a stream with key k is
 * mix64(k + (i + 1) * 0x9E3779B97F4A7C15), i.e. SplitMix64 started at k.
 * Streams for independent work items are derived with `substream`, which
 * depends only on (key, index), never on draw order or thread placement.
 */
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : key_(mix64(seed ^ 0x6A09E667F3BCC909ULL)) {}

    /// Stream for work item `index`: key = mix64(key ^ mix64(index + 0xBB67AE8584CAA73B)).
    RandomStream substream(std::uint64_t index) const;

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();

    /// Exponential with unit rate, by inversion.
    double exponential();

    /// Standard normal, Box-Muller (cosine branch only).
    double normal();

    /// Gamma(shape, 1) via Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
    double gamma(double shape);

    /// Geometric on {1, 2, ...} with success probability p, by inversion:
    /// 1 + floor(log(U) / log(1 - p)).
    std::uint64_t geometric(double p);

    std::uint64_t counter() const { return counter_; }

private:
    struct raw_key_tag {};
    RandomStream(std::uint64_t key, raw_key_tag) : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace switchkit
