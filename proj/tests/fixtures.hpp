#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <string>

#include "switchkit/grid.hpp"

namespace fixtures {

inline double exp_expected(double t) { return std::exp(-2.0 * t); }

// Gamma(shape 2, scale 2) switching times
inline double gamma_expected(double t) {
    return std::numbers::sqrt2 * std::sin((2.0 * t + std::numbers::pi) / 4.0) * std::exp(-t / 2.0);
}
inline double gamma_expected_derivative(double t) { return -std::exp(-t / 2.0) * std::sin(t / 2.0); }
inline double gamma_covariance(double t) { return std::cos(t / 2.0) * std::exp(-t / 2.0); }

inline double sech(double x) { return 1.0 / std::cosh(x); }
inline double sech_covariance(double t) { return 2.0 / std::numbers::pi * std::asin(sech(t / 2.0)); }
inline double sech_divisor_cdf(double t) { return 1.0 - sech(t / 2.0); }
inline double sech_divisor_pdf(double t) { return 0.5 * std::tanh(t / 2.0) * sech(t / 2.0); }

inline double max_abs_error(const switchkit::GridFunction& g, double (*exact)(double), double t_from = 0.0,
                            double t_to = 1e300) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        if (t < t_from || t > t_to) continue;
        worst = std::max(worst, std::abs(g[i] - exact(t)));
    }
    return worst;
}

inline std::filesystem::path tmp_path(const std::string& name) {
    const char* dir = std::getenv("SWITCHKIT_TEST_TMP");
    return std::filesystem::path(dir ? dir : std::filesystem::temp_directory_path().string()) / name;
}

}  // namespace fixtures
