#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace switchkit {

/// Uniform time grid 0, h, 2h, ..., t_end.
struct GridSpec {
    double t_end = 1.0;
    double h = 1e-3;

    /// Number of grid points, including both endpoints.
    std::size_t size() const;
    void validate() const;
};

/**
 * A real function tabulated on the uniform grid t_i = i*h, i = 0..n-1.
 *
 * Values are immutable once constructed. All operations that combine two
 * grid functions require identical step and length.
 */
class GridFunction {
public:
    GridFunction(double h, std::vector<double> values);

    /// Tabulate fn on the grid. fn must be finite at every grid point.
    static GridFunction tabulate(const GridSpec& grid, const std::function<double(double)>& fn);

    /**
     * Tabulate a density that may be singular at the origin. The origin is
     * skipped when fn(0) is not finite and v[0] is linearly extrapolated
     * from v[1], v[2]; origin_extrapolated() then reports true.
     */
    static GridFunction tabulate_density(const GridSpec& grid,
                                         const std::function<double(double)>& fn);

    static GridFunction zeros(const GridSpec& grid);

    double t0() const { return 0.0; }
    double step() const { return h_; }
    std::size_t size() const { return values_.size(); }
    double t_end() const { return h_ * static_cast<double>(values_.size() - 1); }
    double time(std::size_t i) const { return h_ * static_cast<double>(i); }
    GridSpec spec() const { return {t_end(), h_}; }

    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double front() const { return values_.front(); }
    double back() const { return values_.back(); }

    /// Linear interpolation; constant extrapolation outside [0, t_end].
    double at(double t) const;

    bool origin_extrapolated() const { return origin_extrapolated_; }
    bool compatible(const GridFunction& other) const;

    double max() const;
    double min() const;

    GridFunction map(const std::function<double(double, double)>& fn) const;

    friend bool operator==(const GridFunction&, const GridFunction&) = default;

private:
    double h_;
    std::vector<double> values_;
    bool origin_extrapolated_ = false;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);

/// Throws std::invalid_argument unless a and b share step and length.
void require_compatible(const GridFunction& a, const GridFunction& b, const char* what);

/**
 * Trapezoid discretisation of (f*g)(t) = int_0^t f(t-x) g(x) dx on the
 * common grid. Both inputs are treated as zero for t < 0; the part of the
 * convolution beyond the grid end is dropped. Output points are computed
 * independently, so `workers` only affects wall time.
 */
GridFunction convolve(const GridFunction& f, const GridFunction& g, unsigned workers = 1);

/// Trapezoid antiderivative, zero at the origin.
GridFunction cumulative_integral(const GridFunction& g);

/// Trapezoid integral over the whole grid.
double integral(const GridFunction& g);

/// Central differences inside, second-order one-sided stencils at the ends.
GridFunction derivative(const GridFunction& g);

/// Second differences inside, second-order one-sided stencils at the ends.
GridFunction second_derivative(const GridFunction& g);

/**
 * F^n / (1 - F): bounds |sum_{k>n} (-1)^k F^{k*}(t)| for every t <= t1
 * when F = F(t1). Throws std::domain_error for F >= 1 (vacuous bound).
 */
double convolution_tail_bound(double cdf_at_t1, long n);

// Serialization. CSV carries a `t,value` header; extra columns are ignored
// by the reader. Non-uniform or non-zero-based grids are rejected.
void write_csv(std::ostream& out, const GridFunction& g);
void write_csv(std::ostream& out, const GridFunction& g, const GridFunction& stderr_column);
void write_csv_file(const std::string& path, const GridFunction& g);
GridFunction read_csv(std::istream& in);
GridFunction read_csv_file(const std::string& path);

nlohmann::json to_json(const GridFunction& g);
GridFunction grid_from_json(const nlohmann::json& j);

}  // namespace switchkit
