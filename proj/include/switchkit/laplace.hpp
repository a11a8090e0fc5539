#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "switchkit/grid.hpp"

namespace switchkit {

using Complex = std::complex<double>;

/**
 * A Laplace-domain function s -> value. Evaluators accept complex
 * arguments so the same object feeds both real-axis checks and contour
 * inversion. `valid_at` flags real s where a derived transform left its
 * admissible range (it defaults to always-valid).
 */
class LaplaceFunction {
public:
    using Evaluator = std::function<Complex(Complex)>;

    explicit LaplaceFunction(Evaluator eval, double domain_floor = 0.0,
                             std::function<bool(double)> valid = {});

    double operator()(double s) const { return eval_(Complex(s, 0.0)).real(); }
    Complex operator()(Complex s) const { return eval_(s); }

    double domain_floor() const { return domain_floor_; }
    bool valid_at(double s) const { return valid_ ? valid_(s) : true; }

private:
    Evaluator eval_;
    double domain_floor_;
    std::function<bool(double)> valid_;
};

/// L(E)(s) = (1/s) (1 - psi(s)) / (1 + psi(s)).
LaplaceFunction expected_laplace_from_psi(const LaplaceFunction& psi);

/// psi(s) = (1 - s L(E)(s)) / (1 + s L(E)(s)); valid_at(s) checks s L(E)(s) in [-1, 1].
LaplaceFunction psi_from_expected_laplace(const LaplaceFunction& expected_laplace);

/// L(C)(s) = (1/s) (1 - (2/mu) L(E)(s)).
LaplaceFunction covariance_laplace(const LaplaceFunction& expected_laplace, double mu);

struct TalbotOptions {
    int nodes = 32;
    unsigned workers = 1;
};

/// Fixed-Talbot inversion at a single t > 0. Returns NaN if any node value is non-finite.
double talbot_invert(const LaplaceFunction& fn, double t, int nodes = 32);

struct InversionResult {
    GridFunction values;
    /// Grid indices where inversion failed; their values are copied from
    /// the nearest successful point.
    std::vector<std::size_t> failed;
};

/**
 * Invert fn at every grid point independently. The origin is never
 * evaluated directly (Talbot needs t > 0) and is always reported as failed.
 */
InversionResult invert_laplace(const LaplaceFunction& fn, const GridSpec& grid,
                               const TalbotOptions& options = {});

struct CMConfig {
    int max_order = 6;
    double tol = 1e-7;
    std::vector<double> s_grid;  // empty means default_cm_grid()
};

/// 40 log-spaced points on [1e-2, 1e2].
std::vector<double> default_cm_grid();

struct CMViolation {
    double s;
    int order;
    double value;  // (-1)^n f^(n)(s) estimate, scaled by 1 / (|f(s)| + 1)
};

/**
 * Complete-monotonicity screen. A pass means no violation was found on the
 * sampled points, which is a necessary condition only.
 */
struct CMReport {
    bool passed = true;
    int max_order_checked = 0;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    std::vector<CMViolation> violations;
};

/**
 * Screens (-1)^n f^(n)(s) >= 0 for n = 0..max_order on s_grid using forward
 * differences. A completely monotone function has (-1)^n Delta_h^n f >= 0
 * for every step h > 0, so the step is free to grow with the order until
 * round-off sits well below tol.
 */
CMReport cm_check(const LaplaceFunction& fn, const std::vector<double>& s_grid, int max_order = 6,
                  double tol = 1e-7);
CMReport cm_check(const LaplaceFunction& fn, const CMConfig& config);

nlohmann::json to_json(const CMReport& report);

}  // namespace switchkit
