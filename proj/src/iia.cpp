#include "switchkit/iia.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace switchkit {

GaussianCovariance diffusion2d_covariance() {
    GaussianCovariance g;
    g.name = "diffusion2d";
    g.r = [](double t) { return 1.0 / std::cosh(0.5 * t); };
    g.dr = [](double t) { return -0.5 * std::tanh(0.5 * t) / std::cosh(0.5 * t); };
    g.d2r = [](double t) {
        const double sech = 1.0 / std::cosh(0.5 * t);
        const double th = std::tanh(0.5 * t);
        return 0.25 * sech * (th * th - sech * sech);
    };
    return g;
}

GaussianCovariance exponential_covariance() {
    GaussianCovariance g;
    g.name = "exp";
    g.r = [](double t) { return std::exp(-t); };
    g.dr = [](double t) { return -std::exp(-t); };
    g.d2r = [](double t) { return std::exp(-t); };
    return g;
}

GaussianCovariance damped_cosine_covariance() {
    GaussianCovariance g;
    g.name = "damped-cos";
    g.r = [](double t) { return std::cos(t) * std::exp(-t); };
    g.dr = [](double t) { return -(std::sin(t) + std::cos(t)) * std::exp(-t); };
    g.d2r = [](double t) { return 2.0 * std::sin(t) * std::exp(-t); };
    return g;
}

GaussianCovariance tabulated_covariance(const GridFunction& table, std::string name) {
    GaussianCovariance g;
    g.name = std::move(name);
    g.r = [table](double t) { return table.at(t); };
    return g;
}

GridFunction clip_covariance(const GaussianCovariance& r, const GridSpec& grid) {
    return GridFunction::tabulate(grid, [&](double t) {
        const double v = r.r(t);
        if (!(std::abs(v) <= 1.0 + 1e-12)) {
            std::ostringstream os;
            os << "clip_covariance: |r(" << t << ")| = " << std::abs(v) << " exceeds 1";
            throw std::invalid_argument(os.str());
        }
        return 2.0 / std::numbers::pi * std::asin(std::clamp(v, -1.0, 1.0));
    });
}

ShapeReport check_iia_conditions(const GaussianCovariance& cov, const GridSpec& grid, const IIAConfig& config) {
    const GridFunction r = GridFunction::tabulate(grid, cov.r);
    const GridFunction dr = cov.dr ? GridFunction::tabulate(grid, cov.dr) : derivative(r);
    const GridFunction d2r = cov.d2r ? GridFunction::tabulate(grid, cov.d2r) : second_derivative(r);
    ShapeReport report;
    report.value_near_zero = r.front();
    report.value_at_end = r.back();
    if (!cov.dr || !cov.d2r) report.notes.push_back("derivatives of r estimated by finite differences");

    const auto worst = [&](const std::string& name, auto&& score, std::size_t begin) {
        ShapeCondition c{name, 0.0, 0.0, config.sign_tol, true};
        for (std::size_t i = begin; i < r.size(); ++i) {
            const double v = score(i);
            if (v > c.worst_violation) {
                c.worst_violation = v;
                c.location = r.time(i);
            }
        }
        return c;
    };
    report.add(worst("nonnegative", [&](std::size_t i) { return -r[i]; }, 0));
    report.add(worst("nonincreasing", [&](std::size_t i) { return dr[i]; }, 0));

    const double window = config.origin_window_steps * grid.h;
    std::size_t skipped_singular = 0;
    ShapeCondition curvature = worst(
        "curvature_bound",
        [&](std::size_t i) {
            const double t = r.time(i);
            if (t < window) return 0.0;
            const double denom = 1.0 - r[i] * r[i];
            if (denom < 1e-10) {
                ++skipped_singular;
                return 0.0;
            }
            const double bound = -dr[i] * dr[i] * r[i] / denom;
            return bound - d2r[i];
        },
        0);
    report.add(curvature);
    std::ostringstream note;
    note << "curvature_bound skipped on t < " << window << " (origin window)";
    report.notes.push_back(note.str());
    if (skipped_singular > 0)
        report.notes.push_back("curvature_bound skipped at " + std::to_string(skipped_singular) +
                               " points with 1 - r^2 < 1e-10");
    return report;
}

IIAResult iia_pipeline(const GaussianCovariance& r, const GridSpec& grid, const IIAConfig& config) {
    IIAResult out;
    out.screen = check_iia_conditions(r, grid, config);
    if (!out.screen.passed) {
        out.failure = "screen: covariance of the clipped process is not admissible";
        return out;
    }
    const GridFunction c = clip_covariance(r, grid);
    out.covariance_shape = check_covariance_shape(c, config.shape);
    if (!out.covariance_shape.passed) {
        out.failure = "covariance shape check failed";
        return out;
    }
    try {
        out.divisor = divisor_from_covariance(c, config.shape);
    } catch (const std::exception& e) {
        out.failure = std::string("divisor recovery: ") + e.what();
        return out;
    }
    out.switching_law = switching_law_from_divisor(make_tabulated(out.divisor->pdf), config.talbot_nodes);
    out.succeeded = true;
    return out;
}

nlohmann::json to_json(const IIAResult& result) {
    nlohmann::json j{{"succeeded", result.succeeded},
                     {"screen", to_json(result.screen)},
                     {"failure", result.failure}};
    if (!result.covariance_shape.conditions.empty()) j["covariance_shape"] = to_json(result.covariance_shape);
    if (result.divisor) {
        j["mu"] = result.divisor->mu;
        j["mu_cross_check"] = result.divisor->mu_cross_check;
        j["divisor_raw_mass"] = result.divisor->raw_mass;
    }
    if (result.switching_law) {
        j["switching_law"] = {{"r", result.switching_law->r()}, {"mean", result.switching_law->mean()}};
    }
    return j;
}

}  // namespace switchkit
