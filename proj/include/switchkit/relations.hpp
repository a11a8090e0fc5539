#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "switchkit/distributions.hpp"
#include "switchkit/grid.hpp"

namespace switchkit {

struct SeriesOptions {
    double tol = 1e-6;       // truncation target; total truncation error is at most 2 tol
    long max_terms = 10000;  // hard cap on convolution powers
    unsigned workers = 1;
};

struct SeriesResult {
    GridFunction values;
    long terms = 0;                 // convolution powers summed
    double truncation_bound = 0.0;  // bound on the omitted alternating tail (before the factor 2)
    bool density_approximate = false;
    bool origin_extrapolated = false;
};

/**
 * E(t) = 1 + 2 sum_{k>=1} (-1)^k F^{k*}(t) on the grid, with F^{(k+1)*} = f * F^{k*}.
 *
 * Terms are added until the grouped geometric bound
 *   m * convolution_tail_bound(F^{m*}(t_end), floor((N+1)/m))
 * drops below tol for some block size m <= N, which also covers grids on
 * which F(t_end) is close to one. Throws resource_error past max_terms.
 */
SeriesResult expected_value_series(const SwitchingDistribution& dist, const GridSpec& grid,
                                   const SeriesOptions& options = {});

/**
 * E'(t) = 2 sum_{k>=1} (-1)^k f^{*k}(t). The tail uses
 * f^{*(1+j)} <= sup f * F^{j*} together with the same grouping, so the
 * density has to be bounded on the grid.
 */
SeriesResult expected_derivative_series(const SwitchingDistribution& dist, const GridSpec& grid,
                                        const SeriesOptions& options = {});

/// C(t) = 1 - (2/mu) int_0^t E.
GridFunction covariance_from_expected(const GridFunction& expected, double mu);

/// E(t) = -(mu/2) C'(t).
GridFunction expected_from_covariance(const GridFunction& covariance, double mu);

/**
 * Covariance through the forward delay A of the stationary process:
 * C = 1 - F_A - E * f_A with f_A = (1 - F) / mu. Independent of the
 * integration route above; used as a cross-check.
 */
GridFunction covariance_from_delay(const GridFunction& expected, const GridFunction& cdf, double mu);

struct MeanEstimate {
    double value = 0.0;     // 2 (integral + tail)
    double integral = 0.0;  // trapezoid integral of E over the grid
    double tail = 0.0;      // extrapolated integral beyond the grid end
    double decay_rate = 0.0;
    std::string warning;    // non-empty when |E(t_end)| >= 1e-4
};

/**
 * mean = 2 int_0^inf E(u) du. The part beyond the grid is extrapolated from
 * a least-squares fit of the log of the decreasing envelope of |E| over the
 * last tenth of the grid. A window whose envelope falls by less than 10% is
 * refused with numeric_error. When |E| stays below noise_floor on the window
 * (pass the known error of E, e.g. twice the series truncation bound) the
 * tail is taken as zero.
 */
MeanEstimate mean_from_expected(const GridFunction& expected, double noise_floor = 0.0);

struct ShapeConfig {
    double sign_tol = 1e-6;   // sign conditions
    double limit_tol = 1e-3;  // limits at 0 and at the grid end
    double jump_tol = 5e-2;   // max relative jump between adjacent difference quotients
    // differentiability is required on (0, inf) only; a power singularity t^-a
    // (a < 1) at the origin gives relative jumps a / k at index k, so skip 1 / jump_tol steps
    double origin_window_steps = 20.0;
};

struct ShapeCondition {
    std::string name;
    double worst_violation = 0.0;
    double location = 0.0;
    double tolerance = 0.0;
    bool passed = true;
};

struct ShapeReport {
    bool passed = true;
    std::vector<ShapeCondition> conditions;
    double value_near_zero = 0.0;
    double value_at_end = 0.0;
    std::vector<std::string> notes;

    const ShapeCondition* find(const std::string& name) const;
    void add(ShapeCondition condition);
};

nlohmann::json to_json(const ShapeReport& report);

/**
 * Conditions for E to come from a switching law in GD(2): E(0) = 1,
 * E -> 0, E differentiable on (0, inf) (outside the origin window, adjacent
 * difference quotients never jump by more than jump_tol relative to their
 * size), E' <= 0 and E >= 0.
 */
ShapeReport check_expected_shape(const GridFunction& expected, const ShapeConfig& config = {});

/**
 * Conditions for C to be the covariance of a stationary switch process with
 * a GD(2) law: C(0) = 1, C >= 0, C' <= 0, C'' >= 0, plus decay to zero at
 * the grid end so that the recovered divisor carries unit mass.
 */
ShapeReport check_covariance_shape(const GridFunction& covariance, const ShapeConfig& config = {});

struct DivisorRecovery {
    double mu = 0.0;             // from covariance only
    double mu_cross_check = 0.0; // from covariance only: 2 int E for E = -(mu/2) C'
    GridFunction cdf;            // F~
    GridFunction pdf;            // f~, renormalised to unit mass
    double raw_mass = 1.0;       // mass of f~ before renormalisation
    double cdf_adjustment = 0.0; // largest change made to enforce F~(0) = 0 and monotonicity
};

/// F~ = 1 - E, f~ = -E' (as F~'). Refuses (std::invalid_argument) when the shape check fails.
DivisorRecovery divisor_from_expected(const GridFunction& expected, const ShapeConfig& config = {});

/**
 * mu = -2 / C'(0+) from a one-sided second-order stencil, cross-checked
 * against 2 int E with relative tolerance 1e-2; then F~ = 1 + (mu/2) C'
 * and f~ = (mu/2) C'', taken as the derivative of F~ after F~(0) = 0 is pinned.
 */
DivisorRecovery divisor_from_covariance(const GridFunction& covariance, const ShapeConfig& config = {});

/// The GD(2) switching law with the given divisor (one-half thinning of the divisor's renewal process).
GeometricCompound switching_law_from_divisor(const SwitchingDistribution& divisor, int talbot_nodes = 32);

}  // namespace switchkit
