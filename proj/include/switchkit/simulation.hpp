#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "switchkit/distributions.hpp"
#include "switchkit/grid.hpp"
#include "switchkit/random.hpp"

namespace switchkit {

/// Switch epochs of one realisation. X(t) = initial_sign * (-1)^{#epochs <= t}.
struct SwitchTrajectory {
    std::vector<double> epochs;  // strictly increasing; the last one may exceed horizon
    int initial_sign = 1;
    double horizon = 0.0;

    std::size_t count_until(double t) const;
    int value_at(double t) const;
};

/// Draw inter-switch times until their partial sum exceeds the horizon.
SwitchTrajectory simulate_switch(const SwitchingDistribution& dist, double horizon, RandomStream& rng);
SwitchTrajectory simulate_switch(const SwitchingDistribution& dist, double horizon, std::uint64_t seed);

/// State around the origin of the stationary process: forward delay A,
/// backward delay B, and sign delta.
struct StationaryInitial {
    double a = 0.0;
    double b = 0.0;
    int delta = 1;
};

/**
 * One stationary realisation. `forward` carries Y on [0, horizon] (first
 * epoch at A, sign -delta before it); `backward` carries Y(-t) for t >= 0
 * in reflected time (first epoch at B). Both hold -delta on (-B, A).
 */
struct StationaryPath {
    StationaryInitial initial;
    SwitchTrajectory forward;
    SwitchTrajectory backward;

    int value_at(double t) const { return t >= 0.0 ? forward.value_at(t) : backward.value_at(-t); }
};

/**
 * (A, B) is drawn by taking a length-biased interval L with density
 * t f(t) / mean and splitting it at a uniform point, A = U L, B = (1 - U) L,
 * which has joint density f(a + b) / mean. The forward and backward parts
 * continue as two independent switch processes.
 */
StationaryPath simulate_stationary(const SwitchingDistribution& dist, double horizon, RandomStream& rng);
StationaryPath simulate_stationary(const SwitchingDistribution& dist, double horizon, std::uint64_t seed);

struct MonteCarloEstimate {
    GridFunction value;
    GridFunction standard_error;
    std::size_t n_paths = 0;
};

/**
 * Pointwise mean of X(t) over independent paths. Path i draws from
 * RandomStream(seed).substream(i); paths are summed in fixed blocks of 1024
 * and the block sums combined pairwise, so the result does not depend on
 * `workers`.
 */
MonteCarloEstimate estimate_expected_value(const SwitchingDistribution& dist, const GridSpec& grid,
                                           std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

/// Pointwise mean of Y(t) Y(0) over stationary paths; same stream layout.
MonteCarloEstimate estimate_covariance(const SwitchingDistribution& dist, const GridSpec& grid,
                                       std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

/// Pointwise mean of Y(t) over stationary paths (stationarity diagnostics).
MonteCarloEstimate estimate_stationary_mean(const SwitchingDistribution& dist, const GridSpec& grid,
                                            std::size_t n_paths, std::uint64_t seed, unsigned workers = 1);

}  // namespace switchkit
