#include "switchkit/divisibility.hpp"

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace switchkit {

LaplaceFunction divisor_laplace(const LaplaceFunction& psi, double r) {
    if (!(r > 1.0) || !std::isfinite(r)) throw std::invalid_argument("divisor_laplace: r must be > 1");
    return LaplaceFunction(
        [psi, r](Complex s) {
            const Complex p = psi(s);
            return r * p / (1.0 + (r - 1.0) * p);
        },
        psi.domain_floor());
}

LaplaceFunction reduce_order(const LaplaceFunction& divisor_psi, double r, double u) {
    if (!(r > 1.0) || !std::isfinite(r)) throw std::invalid_argument("reduce_order: r must be > 1");
    if (!(u > 1.0 && u <= r)) throw std::invalid_argument("reduce_order: u must lie in (1, r]");
    const double ratio = u / r;
    return LaplaceFunction(
        [divisor_psi, ratio](Complex s) {
            const Complex p = divisor_psi(s);
            return ratio * p / (1.0 - (1.0 - ratio) * p);
        },
        divisor_psi.domain_floor());
}

DivisibilityReport gd_check(const LaplaceFunction& psi, double r, const CMConfig& config) {
    DivisibilityReport report;
    report.r = r;
    const LaplaceFunction divisor = divisor_laplace(psi, r);
    report.cm_report = cm_check(divisor, config);
    report.laplace_at_zero = divisor(0.0);
    report.passed = report.cm_report.passed &&
                    std::abs(report.laplace_at_zero - 1.0) <= report.normalization_tol;
    return report;
}

DivisibilityReport gd_check(const SwitchingDistribution& dist, double r, const CMConfig& config) {
    return gd_check(dist.laplace_function(), r, config);
}

nlohmann::json to_json(const DivisibilityReport& report) {
    return {{"r", report.r},
            {"passed", report.passed},
            {"laplace_at_zero", report.laplace_at_zero},
            {"normalization_tol", report.normalization_tol},
            {"cm_report", to_json(report.cm_report)}};
}

}  // namespace switchkit
