#pragma once

#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "switchkit/distributions.hpp"
#include "switchkit/grid.hpp"
#include "switchkit/relations.hpp"

namespace switchkit {

/// Correlation function r(t), t >= 0, of a zero-mean stationary Gaussian process.
struct GaussianCovariance {
    std::string name;
    std::function<double(double)> r;
    std::function<double(double)> dr;   // optional analytic r'
    std::function<double(double)> d2r;  // optional analytic r''
};

/// r(t) = sech(t/2), the two-dimensional diffusion fixture, with analytic derivatives.
GaussianCovariance diffusion2d_covariance();

/// r(t) = exp(-t), with analytic derivatives.
GaussianCovariance exponential_covariance();

/// r(t) = cos(t) exp(-t), with analytic derivatives.
GaussianCovariance damped_cosine_covariance();

/// Covariance read from a CSV table; derivatives come from finite differences.
GaussianCovariance tabulated_covariance(const GridFunction& table, std::string name = "table");

/// C(t) = (2/pi) arcsin(r(t)) on the grid. Throws if |r| > 1 + 1e-12.
GridFunction clip_covariance(const GaussianCovariance& r, const GridSpec& grid);

struct IIAConfig {
    double sign_tol = 1e-6;
    double origin_window_steps = 10.0;  // condition (iii) is skipped for t < window * h
    ShapeConfig shape;
    int talbot_nodes = 32;
};

/**
 * Screens r >= 0, r' <= 0 and r'' >= -(r')^2 r / (1 - r^2) on the grid.
 * The last condition is skipped inside the origin window and wherever
 * 1 - r^2 < 1e-10; both exclusions are listed in the report notes.
 */
ShapeReport check_iia_conditions(const GaussianCovariance& r, const GridSpec& grid, const IIAConfig& config = {});

struct IIAResult {
    ShapeReport screen;            // admissibility of r
    ShapeReport covariance_shape;  // shape of the clipped covariance
    bool succeeded = false;
    std::string failure;           // stage and reason when !succeeded
    std::optional<DivisorRecovery> divisor;
    std::optional<GeometricCompound> switching_law;
};

/**
 * clip -> covariance shape check -> divisor recovery -> GD(2) compound.
 * Stops after the first failing stage; a failed screen carries no payload.
 */
IIAResult iia_pipeline(const GaussianCovariance& r, const GridSpec& grid, const IIAConfig& config = {});

nlohmann::json to_json(const IIAResult& result);

}  // namespace switchkit
