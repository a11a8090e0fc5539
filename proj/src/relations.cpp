#include "switchkit/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "switchkit/errors.hpp"

namespace switchkit {

namespace {

// Smallest bound m * q_m^floor(n/m) / (1 - q_m) over block sizes m with
// q_m = F^{m*}(t_end) < 1. `powers[m-1]` holds q_m.
double grouped_tail_bound(const std::vector<double>& powers, long n) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < powers.size(); ++idx) {
        const double q = std::clamp(powers[idx], 0.0, 1.0);
        if (q >= 1.0) continue;
        const long m = static_cast<long>(idx) + 1;
        const long a = n / m;
        if (a < 1) continue;
        best = std::min(best, static_cast<double>(m) * convolution_tail_bound(q, a));
    }
    return best;
}

void check_options(const SeriesOptions& options) {
    if (!(options.tol > 0.0)) throw std::invalid_argument("series: tol must be positive");
    if (options.max_terms < 1) throw std::invalid_argument("series: max_terms must be >= 1");
}

[[noreturn]] void too_many_terms(const char* what, long cap, double bound) {
    std::ostringstream os;
    os << what << ": truncation bound " << bound << " still above tolerance after " << cap
       << " convolution powers; use a shorter grid";
    throw resource_error(os.str());
}

}  // namespace

SeriesResult expected_value_series(const SwitchingDistribution& dist, const GridSpec& grid,
                                   const SeriesOptions& options) {
    check_options(options);
    GridFunction power = dist.tabulate_cdf(grid);  // F^{k*}
    GridFunction pdf = dist.tabulate_pdf(grid);
    const bool origin_extrapolated = pdf.origin_extrapolated();
    // Trapezoid mass of f overshoots F(t_end) by about -h^2 f'(0) / 12, which
    // would leave E on a plateau of that order instead of decaying to zero.
    if (const double mass = integral(pdf); mass > 0.0 && power.back() > 0.0) pdf = (power.back() / mass) * pdf;
    std::vector<double> sum(power.size(), 0.0);
    std::vector<double> at_end;
    double bound = std::numeric_limits<double>::infinity();
    long k = 1;
    for (;; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += sign * power[i];
        at_end.push_back(power.back());
        bound = grouped_tail_bound(at_end, k + 1);
        if (bound <= options.tol) break;
        if (k >= options.max_terms) too_many_terms("expected_value_series", options.max_terms, bound);
        power = convolve(pdf, power, options.workers);
    }
    std::vector<double> e(sum.size());
    for (std::size_t i = 0; i < e.size(); ++i) e[i] = 1.0 + 2.0 * sum[i];
    return {GridFunction(grid.h, std::move(e)), k, bound, dist.density_is_approximate(), origin_extrapolated};
}

SeriesResult expected_derivative_series(const SwitchingDistribution& dist, const GridSpec& grid,
                                        const SeriesOptions& options) {
    check_options(options);
    const GridFunction pdf = dist.tabulate_pdf(grid);
    const double sup = pdf.max();
    GridFunction power = pdf;  // f^{*k}
    std::vector<double> sum(power.size(), 0.0);
    std::vector<double> cdf_at_end;  // F^{j*}(t_end), j = 1..k
    double bound = std::numeric_limits<double>::infinity();
    long k = 1;
    for (;; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += sign * power[i];
        cdf_at_end.push_back(std::min(1.0, integral(power)));
        // sum_{j>k} f^{*j} <= sup f * sum_{j>=k} F^{j*}
        bound = sup * grouped_tail_bound(cdf_at_end, k);
        if (bound <= options.tol) break;
        if (k >= options.max_terms) too_many_terms("expected_derivative_series", options.max_terms, bound);
        power = convolve(pdf, power, options.workers);
    }
    std::vector<double> d(sum.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = 2.0 * sum[i];
    return {GridFunction(grid.h, std::move(d)), k, bound, dist.density_is_approximate(), pdf.origin_extrapolated()};
}

namespace {
void require_mu(double mu, const char* what) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument(std::string(what) + ": mu must be positive");
}
}  // namespace

GridFunction covariance_from_expected(const GridFunction& expected, double mu) {
    require_mu(mu, "covariance_from_expected");
    const GridFunction integral_e = cumulative_integral(expected);
    return integral_e.map([mu](double, double v) { return 1.0 - (2.0 / mu) * v; });
}

GridFunction expected_from_covariance(const GridFunction& covariance, double mu) {
    require_mu(mu, "expected_from_covariance");
    return (-0.5 * mu) * derivative(covariance);
}

GridFunction covariance_from_delay(const GridFunction& expected, const GridFunction& cdf, double mu) {
    require_mu(mu, "covariance_from_delay");
    require_compatible(expected, cdf, "covariance_from_delay");
    const GridFunction delay_pdf = cdf.map([mu](double, double v) { return (1.0 - v) / mu; });
    const GridFunction delay_cdf = cumulative_integral(delay_pdf);
    const GridFunction conv = convolve(expected, delay_pdf);
    std::vector<double> c(expected.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 1.0 - delay_cdf[i] - conv[i];
    return GridFunction(expected.step(), std::move(c));
}

MeanEstimate mean_from_expected(const GridFunction& expected, double noise_floor) {
    if (!(noise_floor >= 0.0)) throw std::invalid_argument("mean_from_expected: noise_floor must be >= 0");
    if (expected.size() < 10) throw std::invalid_argument("mean_from_expected: need at least 10 grid points");
    MeanEstimate out;
    out.integral = integral(expected);
    const double end_value = expected.back();
    if (std::abs(end_value) >= 1e-4) {
        std::ostringstream os;
        os << "|E(t_end)| = " << std::abs(end_value) << " >= 1e-4; extend the grid";
        out.warning = os.str();
    }
    const std::size_t n = expected.size();
    const std::size_t window = std::max<std::size_t>(3, n / 10);
    const std::size_t first = n - window;
    double scale = 0.0;
    for (double v : expected.values()) scale = std::max(scale, std::abs(v));
    double window_max = 0.0;
    for (std::size_t i = first; i < n; ++i) window_max = std::max(window_max, std::abs(expected[i]));
    if (window_max <= std::max(1e-13 * std::max(scale, 1.0), noise_floor)) {
        out.value = 2.0 * out.integral;
        return out;
    }
    // least squares of log env on t over the window, env_i = max_{j>=i} |E_j|;
    // the suffix maximum keeps oscillating tails from producing a spurious slope
    std::vector<double> envelope(window);
    double running = 0.0;
    for (std::size_t i = n; i-- > first;) {
        running = std::max(running, std::abs(expected[i]));
        envelope[i - first] = running;
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double count = 0.0;
    for (std::size_t i = first; i < n; ++i) {
        const double v = envelope[i - first];
        if (v <= 0.0) continue;
        const double x = expected.time(i);
        const double y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        count += 1.0;
    }
    const double denom = count * sxx - sx * sx;
    if (count < 3.0 || !(denom > 0.0)) throw numeric_error("mean_from_expected: tail window has too few usable points");
    const double slope = (count * sxy - sx * sy) / denom;
    out.decay_rate = -slope;
    const double window_length = expected.time(n - 1) - expected.time(first);
    if (!(slope < 0.0) || std::exp(slope * window_length) > 0.9) {
        std::ostringstream os;
        os << "mean_from_expected: tail of E does not decay by 10% (fitted log-slope " << slope
           << " over the last tenth of the grid); refusing to extrapolate";
        throw numeric_error(os.str());
    }
    out.tail = end_value / (-slope);
    out.value = 2.0 * (out.integral + out.tail);
    return out;
}

const ShapeCondition* ShapeReport::find(const std::string& name) const {
    for (const auto& c : conditions) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

void ShapeReport::add(ShapeCondition condition) {
    condition.passed = condition.worst_violation <= condition.tolerance;
    passed = passed && condition.passed;
    conditions.push_back(std::move(condition));
}

nlohmann::json to_json(const ShapeReport& report) {
    nlohmann::json conds = nlohmann::json::array();
    for (const auto& c : report.conditions) {
        conds.push_back({{"name", c.name},
                         {"passed", c.passed},
                         {"worst_violation", c.worst_violation},
                         {"location", c.location},
                         {"tolerance", c.tolerance}});
    }
    return {{"passed", report.passed},
            {"conditions", conds},
            {"limits", {{"near_zero", report.value_near_zero}, {"at_end", report.value_at_end}}},
            {"notes", report.notes}};
}

namespace {

// worst = max over i of score(i), reported with its location (0 when never positive)
template <typename Score>
ShapeCondition worst_over(const std::string& name, const GridFunction& g, double tol, std::size_t begin,
                          std::size_t end, Score&& score) {
    ShapeCondition c{name, 0.0, 0.0, tol, true};
    for (std::size_t i = begin; i < end; ++i) {
        const double v = score(i);
        if (v > c.worst_violation) {
            c.worst_violation = v;
            c.location = g.time(i);
        }
    }
    return c;
}

void require_points(const GridFunction& g, std::size_t n, const char* what) {
    if (g.size() < n) throw std::invalid_argument(std::string(what) + ": grid too short");
}

}  // namespace

ShapeReport check_expected_shape(const GridFunction& e, const ShapeConfig& config) {
    require_points(e, 4, "check_expected_shape");
    ShapeReport report;
    report.value_near_zero = e.front();
    report.value_at_end = e.back();
    const double h = e.step();
    const std::size_t n = e.size();
    report.add({"limit_at_zero", std::abs(e.front() - 1.0), 0.0, config.limit_tol, true});
    report.add({"limit_at_infinity", std::abs(e.back()), e.t_end(), config.limit_tol, true});
    // Relative jumps of adjacent difference quotients: a kink keeps a fixed
    // relative jump, a singular slope at the origin gives about h / (2t).
    const auto first = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.origin_window_steps)));
    report.add(worst_over("differentiable", e, config.jump_tol, std::min(first, n - 1), n - 1, [&](std::size_t i) {
        const double left = (e[i] - e[i - 1]) / h;
        const double right = (e[i + 1] - e[i]) / h;
        return std::abs(right - left) / std::max({1.0, std::abs(left), std::abs(right)});
    }));
    if (first > 1) report.notes.push_back("differentiability not assessed for t < " + std::to_string(static_cast<double>(first) * h));
    report.add(worst_over("nonincreasing", e, config.sign_tol, 0, n - 1,
                          [&](std::size_t i) { return (e[i + 1] - e[i]) / h; }));
    report.add(worst_over("nonnegative", e, config.sign_tol, 0, n, [&](std::size_t i) { return -e[i]; }));
    return report;
}

ShapeReport check_covariance_shape(const GridFunction& c, const ShapeConfig& config) {
    require_points(c, 4, "check_covariance_shape");
    ShapeReport report;
    report.value_near_zero = c.front();
    report.value_at_end = c.back();
    const double h = c.step();
    const std::size_t n = c.size();
    const GridFunction c2 = second_derivative(c);
    report.add({"unit_at_zero", std::abs(c.front() - 1.0), 0.0, config.limit_tol, true});
    report.add(worst_over("nonnegative", c, config.sign_tol, 0, n, [&](std::size_t i) { return -c[i]; }));
    report.add(worst_over("nonincreasing", c, config.sign_tol, 0, n - 1,
                          [&](std::size_t i) { return (c[i + 1] - c[i]) / h; }));
    report.add(worst_over("convex", c, config.sign_tol, 0, n, [&](std::size_t i) { return -c2[i]; }));
    report.add({"decay", std::abs(c.back()), c.t_end(), config.limit_tol, true});
    return report;
}

namespace {

// Enforce F(0) = 0 and monotonicity; returns the largest change made.
double enforce_cdf(std::vector<double>& f) {
    double change = std::abs(f[0]);
    f[0] = 0.0;
    double running = 0.0;
    for (double& v : f) {
        if (v < running) {
            change = std::max(change, running - v);
            v = running;
        }
        running = v;
    }
    return change;
}

GridFunction normalized_density(const GridFunction& raw, double sign_tol, double& mass) {
    std::vector<double> v(raw.values().begin(), raw.values().end());
    for (double& x : v) {
        if (x < 0.0) {
            if (x < -sign_tol) {
                std::ostringstream os;
                os << "recovered density is negative (" << x << ") beyond tolerance";
                throw numeric_error(os.str());
            }
            x = 0.0;
        }
    }
    GridFunction pdf(raw.step(), std::move(v));
    mass = integral(pdf);
    if (!(std::abs(mass - 1.0) <= 1e-3)) {
        std::ostringstream os;
        os << "recovered density has mass " << mass << ", more than 1e-3 away from one";
        throw numeric_error(os.str());
    }
    return (1.0 / mass) * pdf;
}

[[noreturn]] void refuse(const char* what, const ShapeReport& report) {
    std::string failed;
    for (const auto& c : report.conditions) {
        if (!c.passed) failed += (failed.empty() ? "" : ", ") + c.name;
    }
    throw std::invalid_argument(std::string(what) + ": shape check failed (" + failed + ")");
}

}  // namespace

DivisorRecovery divisor_from_expected(const GridFunction& expected, const ShapeConfig& config) {
    const ShapeReport report = check_expected_shape(expected, config);
    if (!report.passed) refuse("divisor_from_expected", report);
    std::vector<double> cdf(expected.size());
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = 1.0 - expected[i];
    DivisorRecovery out{0.0, 0.0, GridFunction(expected.step(), {0.0}), GridFunction(expected.step(), {0.0})};
    out.cdf_adjustment = enforce_cdf(cdf);
    out.cdf = GridFunction(expected.step(), std::move(cdf));
    out.pdf = normalized_density(derivative(out.cdf), config.sign_tol, out.raw_mass);
    return out;
}

DivisorRecovery divisor_from_covariance(const GridFunction& covariance, const ShapeConfig& config) {
    const ShapeReport report = check_covariance_shape(covariance, config);
    if (!report.passed) refuse("divisor_from_covariance", report);
    const GridFunction slope = derivative(covariance);
    const double slope0 = slope[0];
    if (!(slope0 < 0.0)) throw numeric_error("divisor_from_covariance: C'(0+) is not negative, mean is undefined");
    DivisorRecovery out{0.0, 0.0, GridFunction(covariance.step(), {0.0}), GridFunction(covariance.step(), {0.0})};
    out.mu = -2.0 / slope0;
    // E below sign_tol counts as zero, as in the shape checks
    out.mu_cross_check = mean_from_expected(expected_from_covariance(covariance, out.mu), config.sign_tol).value;
    if (!(std::abs(out.mu_cross_check - out.mu) <= 1e-2 * out.mu)) {
        std::ostringstream os;
        os.precision(10);
        os << "divisor_from_covariance: mean from C'(0) = " << out.mu << " disagrees with 2 int E = "
           << out.mu_cross_check << " (relative tolerance 1e-2)";
        throw numeric_error(os.str());
    }
    std::vector<double> cdf(covariance.size());
    for (std::size_t i = 0; i < cdf.size(); ++i) cdf[i] = 1.0 + 0.5 * out.mu * slope[i];
    out.cdf_adjustment = enforce_cdf(cdf);
    out.cdf = GridFunction(covariance.step(), std::move(cdf));
    // differentiate the pinned CDF: (mu/2) C'' from a one-sided stencil dips below zero at the origin
    out.pdf = normalized_density(derivative(out.cdf), config.sign_tol, out.raw_mass);
    return out;
}

GeometricCompound switching_law_from_divisor(const SwitchingDistribution& divisor, int talbot_nodes) {
    return make_geometric_compound(divisor, 2.0, talbot_nodes);
}

}  // namespace switchkit
