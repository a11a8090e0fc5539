#include "switchkit/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "switchkit/parallel.hpp"

namespace switchkit {

std::size_t SwitchTrajectory::count_until(double t) const {
    return static_cast<std::size_t>(std::upper_bound(epochs.begin(), epochs.end(), t) - epochs.begin());
}

int SwitchTrajectory::value_at(double t) const {
    return (count_until(t) % 2 == 0) ? initial_sign : -initial_sign;
}

namespace {

// Append epochs start, start + T1, ... until one exceeds the horizon.
void extend(std::vector<double>& epochs, double start, double horizon, const SwitchingDistribution& dist,
            RandomStream& rng) {
    double clock = start;
    epochs.push_back(clock);
    while (clock <= horizon) {
        double next = clock + dist.sample(rng);
        if (!(next > clock)) next = std::nextafter(clock, std::numeric_limits<double>::infinity());
        clock = next;
        epochs.push_back(clock);
    }
}

}  // namespace

SwitchTrajectory simulate_switch(const SwitchingDistribution& dist, double horizon, RandomStream& rng) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_switch: horizon must be positive");
    SwitchTrajectory traj;
    traj.horizon = horizon;
    traj.initial_sign = 1;
    double first = dist.sample(rng);
    if (!(first > 0.0)) first = std::numeric_limits<double>::denorm_min();
    extend(traj.epochs, first, horizon, dist, rng);
    return traj;
}

SwitchTrajectory simulate_switch(const SwitchingDistribution& dist, double horizon, std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_switch(dist, horizon, rng);
}

StationaryPath simulate_stationary(const SwitchingDistribution& dist, double horizon, RandomStream& rng) {
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_stationary: horizon must be positive");
    if (!(dist.mean() > 0.0) || !std::isfinite(dist.mean()))
        throw std::invalid_argument("simulate_stationary: mean switching time must be finite");
    StationaryPath path;
    const double length = dist.sample_size_biased(rng);
    const double u = rng.uniform();
    path.initial.a = std::max(u * length, std::numeric_limits<double>::denorm_min());
    path.initial.b = std::max((1.0 - u) * length, std::numeric_limits<double>::denorm_min());
    path.initial.delta = (rng.next_u64() >> 63) ? 1 : -1;

    path.forward.horizon = horizon;
    path.forward.initial_sign = -path.initial.delta;
    extend(path.forward.epochs, path.initial.a, horizon, dist, rng);

    path.backward.horizon = horizon;
    path.backward.initial_sign = -path.initial.delta;
    extend(path.backward.epochs, path.initial.b, horizon, dist, rng);
    return path;
}

StationaryPath simulate_stationary(const SwitchingDistribution& dist, double horizon, std::uint64_t seed) {
    RandomStream rng(seed);
    return simulate_stationary(dist, horizon, rng);
}

namespace {

constexpr std::size_t kBlock = 1024;

// Writes the per-grid-point values (+1/-1) of one path.
template <typename PathFn>
MonteCarloEstimate run_estimator(const GridSpec& grid, std::size_t n_paths, std::uint64_t seed, unsigned workers,
                                 PathFn&& path_values) {
    if (n_paths < 100) throw std::invalid_argument("estimator: n_paths must be >= 100");
    const std::size_t n = grid.size();
    const std::size_t blocks = (n_paths + kBlock - 1) / kBlock;
    std::vector<double> sums(blocks * n, 0.0);
    std::vector<double> squares(blocks * n, 0.0);
    const RandomStream base(seed);
    parallel_for(blocks, workers, [&](std::size_t b0, std::size_t b1) {
        std::vector<double> values(n);
        for (std::size_t b = b0; b < b1; ++b) {
            double* s = &sums[b * n];
            double* q = &squares[b * n];
            const std::size_t last = std::min(n_paths, (b + 1) * kBlock);
            for (std::size_t p = b * kBlock; p < last; ++p) {
                RandomStream rng = base.substream(p);
                path_values(rng, values);
                for (std::size_t i = 0; i < n; ++i) {
                    s[i] += values[i];
                    q[i] += values[i] * values[i];
                }
            }
        }
    });
    std::vector<double> mean(n);
    std::vector<double> se(n);
    std::vector<double> column(blocks);
    const double count = static_cast<double>(n_paths);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t b = 0; b < blocks; ++b) column[b] = sums[b * n + i];
        const double m = pairwise_sum(column.data(), blocks) / count;
        for (std::size_t b = 0; b < blocks; ++b) column[b] = squares[b * n + i];
        const double m2 = pairwise_sum(column.data(), blocks) / count;
        const double var = std::max(0.0, (m2 - m * m) * count / (count - 1.0));
        mean[i] = m;
        se[i] = std::sqrt(var / count);
    }
    return {GridFunction(grid.h, std::move(mean)), GridFunction(grid.h, std::move(se)), n_paths};
}

// Fill values[i] = traj.value_at(i h) by a single sweep over the epochs.
void sweep(const SwitchTrajectory& traj, double h, std::vector<double>& values) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double t = h * static_cast<double>(i);
        while (k < traj.epochs.size() && traj.epochs[k] <= t) ++k;
        values[i] = (k % 2 == 0) ? traj.initial_sign : -traj.initial_sign;
    }
}

}  // namespace

MonteCarloEstimate estimate_expected_value(const SwitchingDistribution& dist, const GridSpec& grid,
                                           std::size_t n_paths, std::uint64_t seed, unsigned workers) {
    const double horizon = grid.h * static_cast<double>(grid.size() - 1);
    return run_estimator(grid, n_paths, seed, workers, [&](RandomStream& rng, std::vector<double>& values) {
        sweep(simulate_switch(dist, horizon, rng), grid.h, values);
    });
}

MonteCarloEstimate estimate_covariance(const SwitchingDistribution& dist, const GridSpec& grid,
                                       std::size_t n_paths, std::uint64_t seed, unsigned workers) {
    const double horizon = grid.h * static_cast<double>(grid.size() - 1);
    return run_estimator(grid, n_paths, seed, workers, [&](RandomStream& rng, std::vector<double>& values) {
        const StationaryPath path = simulate_stationary(dist, horizon, rng);
        sweep(path.forward, grid.h, values);
        const double y0 = path.forward.initial_sign;
        for (double& v : values) v *= y0;
    });
}

MonteCarloEstimate estimate_stationary_mean(const SwitchingDistribution& dist, const GridSpec& grid,
                                            std::size_t n_paths, std::uint64_t seed, unsigned workers) {
    const double horizon = grid.h * static_cast<double>(grid.size() - 1);
    return run_estimator(grid, n_paths, seed, workers, [&](RandomStream& rng, std::vector<double>& values) {
        sweep(simulate_stationary(dist, horizon, rng).forward, grid.h, values);
    });
}

}  // namespace switchkit
