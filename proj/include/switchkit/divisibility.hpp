#pragma once

#include <nlohmann/json_fwd.hpp>

#include "switchkit/distributions.hpp"
#include "switchkit/laplace.hpp"

namespace switchkit {

/// Laplace transform of the r-geometric divisor: r psi / (1 + (r - 1) psi). Requires r > 1.
LaplaceFunction divisor_laplace(const LaplaceFunction& psi, double r);

/**
 * Re-express a compound of order r as a compound of order u, 1 < u <= r:
 * (u/r) psi~ / (1 - (1 - u/r) psi~), where psi~ is the order-r divisor.
 * The result is the order-u divisor of the same compound law.
 */
LaplaceFunction reduce_order(const LaplaceFunction& divisor_psi, double r, double u);

struct DivisibilityReport {
    double r = 2.0;
    bool passed = false;
    CMReport cm_report;
    double laplace_at_zero = 0.0;
    double normalization_tol = 1e-9;
};

/// Screen membership of dist in GD(r): the divisor transform must show no
/// complete-monotonicity violation and equal one at s = 0.
DivisibilityReport gd_check(const SwitchingDistribution& dist, double r, const CMConfig& config = {});
DivisibilityReport gd_check(const LaplaceFunction& psi, double r, const CMConfig& config = {});

nlohmann::json to_json(const DivisibilityReport& report);

}  // namespace switchkit
