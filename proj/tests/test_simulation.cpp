#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "switchkit/distributions.hpp"
#include "switchkit/dsl.hpp"
#include "switchkit/simulation.hpp"

using namespace switchkit;

TEST_CASE("trajectory bookkeeping") {
    SwitchTrajectory tr;
    tr.epochs = {1.0, 2.5, 4.0};
    tr.horizon = 3.0;
    CHECK(tr.count_until(0.5) == 0);
    CHECK(tr.count_until(1.0) == 1);
    CHECK(tr.count_until(3.0) == 2);
    CHECK(tr.value_at(0.0) == 1);
    CHECK(tr.value_at(1.5) == -1);
    CHECK(tr.value_at(2.5) == 1);
}

TEST_CASE("simulate_switch covers the horizon and is deterministic") {
    const auto d = make_gamma(2.0, 2.0);
    const auto a = simulate_switch(d, 100.0, 9);
    const auto b = simulate_switch(d, 100.0, 9);
    CHECK(a.epochs == b.epochs);
    REQUIRE(!a.epochs.empty());
    CHECK(a.epochs.back() > 100.0);
    CHECK(std::is_sorted(a.epochs.begin(), a.epochs.end()));
    CHECK(std::adjacent_find(a.epochs.begin(), a.epochs.end()) == a.epochs.end());
    CHECK(simulate_switch(d, 100.0, 10).epochs != a.epochs);
    CHECK_THROWS_AS(simulate_switch(d, -1.0, 9), std::invalid_argument);
}

TEST_CASE("inter-epoch gaps follow the switching law (two-sample KS)") {
    const auto d = make_gamma(2.0, 2.0);
    constexpr std::size_t n = 10000;
    RandomStream rng(77);
    std::vector<double> gaps;
    while (gaps.size() < n) {
        const auto tr = simulate_switch(d, 200.0, rng);
        double prev = 0.0;
        for (double e : tr.epochs) {
            if (gaps.size() == n) break;
            gaps.push_back(e - prev);
            prev = e;
        }
    }
    RandomStream direct_rng(78);
    std::vector<double> direct(n);
    for (double& x : direct) x = d.sample(direct_rng);
    std::sort(gaps.begin(), gaps.end());
    std::sort(direct.begin(), direct.end());
    double stat = 0.0;
    std::size_t i = 0, j = 0;
    while (i < n && j < n) {
        const double x = std::min(gaps[i], direct[j]);
        while (i < n && gaps[i] <= x) ++i;
        while (j < n && direct[j] <= x) ++j;
        stat = std::max(stat, std::abs(static_cast<double>(i) - static_cast<double>(j)) / n);
    }
    // asymptotic Kolmogorov tail of sqrt(n m / (n + m)) D
    const double scaled = stat * std::sqrt(n / 2.0);
    double p = 0.0;
    for (int k = 1; k < 100; ++k) p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * scaled * scaled);
    CHECK(p > 1e-3);
}

TEST_CASE("stationary start") {
    const auto d = make_exponential(1.0);
    RandomStream rng(4);
    double sum_a = 0.0, sum_delta = 0.0;
    constexpr int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto p = simulate_stationary(d, 5.0, rng);
        REQUIRE(p.initial.a >= 0.0);
        REQUIRE(p.initial.b >= 0.0);
        REQUIRE(std::abs(p.initial.delta) == 1);
        // Y = -delta on (-B, A), +delta just after A
        REQUIRE(p.value_at(0.0) == -p.initial.delta);
        if (p.initial.a > 0.0) REQUIRE(p.value_at(p.initial.a) == p.initial.delta);
        sum_a += p.initial.a;
        sum_delta += p.initial.delta;
    }
    // forward delay of a Poisson process is Exp(1)
    CHECK(std::abs(sum_a / n - 1.0) < 4.0 / std::sqrt(n));
    CHECK(std::abs(sum_delta / n) < 4.0 / std::sqrt(n));
}

TEST_CASE("MC expected value: limits at small and large times") {
    const auto d = make_gamma(2.0, 2.0);
    const auto est = estimate_expected_value(d, {80.0, 0.1}, 20000, 3);
    CHECK(est.n_paths == 20000);
    CHECK(est.value[0] == 1.0);
    CHECK(std::abs(est.value[1] - 1.0) <= 4.0 * est.standard_error[1] + 1e-12);
    // t = 20 mu
    CHECK(std::abs(est.value.back()) <= 4.0 * est.standard_error.back());
}

TEST_CASE("MC estimates do not depend on the worker count") {
    const auto d = make_exponential(1.0);
    const GridSpec grid{3.0, 0.25};
    const auto a = estimate_expected_value(d, grid, 3000, 5, 1);
    const auto b = estimate_expected_value(d, grid, 3000, 5, 4);
    for (std::size_t i = 0; i < a.value.size(); ++i) CHECK(std::abs(a.value[i] - b.value[i]) <= 1e-12);
    const auto c = estimate_covariance(d, grid, 3000, 5, 1);
    const auto e = estimate_covariance(d, grid, 3000, 5, 3);
    for (std::size_t i = 0; i < c.value.size(); ++i) CHECK(std::abs(c.value[i] - e.value[i]) <= 1e-12);
    CHECK_THROWS_AS(estimate_expected_value(d, grid, 10, 5), std::invalid_argument);
}

TEST_CASE("stationary process is flat in mean and variance") {
    const auto d = parse_distribution("gamma(shape=2,scale=2)");
    const auto m = estimate_stationary_mean(d, {10.0, 1.0}, 20000, 8);
    // Y(t)^2 = 1, so Var Y(t) = 1 - (EY(t))^2 is flat whenever the mean is
    for (std::size_t i = 0; i < m.value.size(); ++i) CHECK(std::abs(m.value[i]) <= 4.0 * m.standard_error[i]);
}
