#include "switchkit/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "switchkit/parallel.hpp"

namespace switchkit {

LaplaceFunction::LaplaceFunction(Evaluator eval, double domain_floor, std::function<bool(double)> valid)
    : eval_(std::move(eval)), domain_floor_(domain_floor), valid_(std::move(valid)) {
    if (!eval_) throw std::invalid_argument("LaplaceFunction: empty evaluator");
}

LaplaceFunction expected_laplace_from_psi(const LaplaceFunction& psi) {
    return LaplaceFunction(
        [psi](Complex s) {
            const Complex p = psi(s);
            return (1.0 - p) / ((1.0 + p) * s);
        },
        psi.domain_floor());
}

LaplaceFunction psi_from_expected_laplace(const LaplaceFunction& expected_laplace) {
    return LaplaceFunction(
        [le = expected_laplace](Complex s) {
            const Complex x = s * le(s);
            return (1.0 - x) / (1.0 + x);
        },
        expected_laplace.domain_floor(),
        [le = expected_laplace](double s) {
            const double x = s * le(s);
            return std::isfinite(x) && x >= -1.0 && x <= 1.0;
        });
}

LaplaceFunction covariance_laplace(const LaplaceFunction& expected_laplace, double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("covariance_laplace: mu must be positive");
    return LaplaceFunction(
        [le = expected_laplace, mu](Complex s) { return (1.0 - (2.0 / mu) * le(s)) / s; },
        expected_laplace.domain_floor());
}

double talbot_invert(const LaplaceFunction& fn, double t, int nodes) {
    if (nodes < 2) throw std::invalid_argument("talbot_invert: need at least 2 nodes");
    if (!(t > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double m = static_cast<double>(nodes);
    const double r = 2.0 * m / (5.0 * t);
    const Complex head = fn(Complex(r, 0.0));
    double sum = 0.5 * (head * std::exp(r * t)).real();
    for (int k = 1; k < nodes; ++k) {
        const double theta = static_cast<double>(k) * std::numbers::pi / m;
        const double cot = std::cos(theta) / std::sin(theta);
        const Complex s(r * theta * cot, r * theta);
        const Complex sigma(1.0, theta + (theta * cot - 1.0) * cot);
        const Complex term = std::exp(t * s) * fn(s) * sigma;
        sum += term.real();
    }
    const double value = r / m * sum;
    return std::isfinite(value) ? value : std::numeric_limits<double>::quiet_NaN();
}

InversionResult invert_laplace(const LaplaceFunction& fn, const GridSpec& grid, const TalbotOptions& options) {
    const std::size_t n = grid.size();
    std::vector<double> v(n, std::numeric_limits<double>::quiet_NaN());
    parallel_for(n, options.workers, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = std::max<std::size_t>(begin, 1); i < end; ++i)
            v[i] = talbot_invert(fn, grid.h * static_cast<double>(i), options.nodes);
    });
    std::vector<std::size_t> failed;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(v[i])) failed.push_back(i);
    }
    if (failed.size() == n) throw std::runtime_error("invert_laplace: inversion failed at every grid point");
    // fill failures from the nearest successful neighbour, preferring the right
    for (std::size_t i : failed) {
        for (std::size_t d = 1; d < n; ++d) {
            if (i + d < n && std::isfinite(v[i + d])) {
                v[i] = v[i + d];
                break;
            }
            if (i >= d && std::isfinite(v[i - d])) {
                v[i] = v[i - d];
                break;
            }
        }
    }
    return {GridFunction(grid.h, std::move(v)), std::move(failed)};
}

std::vector<double> default_cm_grid() {
    std::vector<double> s(40);
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = std::pow(10.0, -2.0 + 4.0 * static_cast<double>(i) / 39.0);
    return s;
}

namespace {

double binomial(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * static_cast<double>(n - k + j) / static_cast<double>(j);
    return c;
}

// Relative evaluation noise assumed for f; covers closed forms and
// trapezoid-backed transforms alike.
constexpr double kEvalNoise = 1e-15;

}  // namespace

CMReport cm_check(const LaplaceFunction& fn, const std::vector<double>& s_grid, int max_order, double tol) {
    if (max_order < 0 || max_order > 8) throw std::invalid_argument("cm_check: max_order must be in [0, 8]");
    if (!(tol > 0.0)) throw std::invalid_argument("cm_check: tol must be positive");
    if (s_grid.empty()) throw std::invalid_argument("cm_check: empty s grid");
    CMReport report;
    report.max_order_checked = max_order;
    report.tolerance = tol;
    double prev = 0.0;
    for (double s : s_grid) {
        if (!(s > 0.0) || s < prev) throw std::invalid_argument("cm_check: s grid must be positive and ascending");
        prev = s;
        const double f0 = fn(s);
        const double scale = std::abs(f0) + 1.0;
        for (int n = 0; n <= max_order; ++n) {
            double value;
            if (n == 0) {
                value = f0;
            } else {
                const double roundoff_floor =
                    std::pow(std::pow(2.0, n) * kEvalNoise / (1e-2 * tol), 1.0 / static_cast<double>(n));
                const double step = std::max({1e-2 * s, 1e-3, roundoff_floor});
                double acc = 0.0;
                for (int j = 0; j <= n; ++j) {
                    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                    acc += sign * binomial(n, j) * fn(s + static_cast<double>(j) * step);
                }
                value = acc / std::pow(step, n);
            }
            const double scaled = value / scale;
            if (!std::isfinite(scaled) || scaled < -tol) {
                const double amount = std::isfinite(scaled) ? -scaled : std::numeric_limits<double>::infinity();
                report.violations.push_back({s, n, scaled});
                report.worst_violation = std::max(report.worst_violation, amount);
            }
        }
    }
    report.passed = report.worst_violation <= tol;
    return report;
}

CMReport cm_check(const LaplaceFunction& fn, const CMConfig& config) {
    return cm_check(fn, config.s_grid.empty() ? default_cm_grid() : config.s_grid, config.max_order, config.tol);
}

nlohmann::json to_json(const CMReport& report) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& v : report.violations) points.push_back({{"s", v.s}, {"order", v.order}, {"value", v.value}});
    return {{"passed", report.passed},
            {"verdict", report.passed ? "no violation found" : "violation found"},
            {"max_order_checked", report.max_order_checked},
            {"worst_violation", report.worst_violation},
            {"tolerance", report.tolerance},
            {"violation_points", points}};
}

}  // namespace switchkit
