#include "switchkit/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace switchkit {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RandomStream RandomStream::substream(std::uint64_t index) const {
    return RandomStream(mix64(key_ ^ mix64(index + 0xBB67AE8584CAA73BULL)), raw_key_tag{});
}

std::uint64_t RandomStream::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform()); }

double RandomStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double RandomStream::gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::uint64_t RandomStream::geometric(double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("geometric: p must be in (0, 1]");
    if (p == 1.0) return 1;
    return 1 + static_cast<std::uint64_t>(std::floor(std::log(uniform()) / std::log1p(-p)));
}

}  // namespace switchkit
