#pragma once

#include <memory>
#include <optional>
#include <string>

#include "switchkit/grid.hpp"
#include "switchkit/laplace.hpp"
#include "switchkit/random.hpp"

namespace switchkit {

namespace detail {

/// Behaviour behind a SwitchingDistribution. Implementations are immutable.
class SwitchingLaw {
public:
    virtual ~SwitchingLaw() = default;
    virtual double pdf(double t) const = 0;
    virtual double cdf(double t) const = 0;
    virtual Complex laplace(Complex s) const = 0;
    virtual double mean() const = 0;
    virtual double sample(RandomStream& rng) const = 0;
    /// Draw from the length-biased law t f(t) / mean.
    virtual double sample_size_biased(RandomStream& rng) const = 0;
    virtual std::string describe() const = 0;
    virtual bool density_is_approximate() const { return false; }
};

}  // namespace detail

/**
 * Law of the i.i.d. positive times between switches. Cheap to copy; all
 * copies share one immutable implementation.
 */
class SwitchingDistribution {
public:
    explicit SwitchingDistribution(std::shared_ptr<const detail::SwitchingLaw> law);

    double pdf(double t) const { return law_->pdf(t); }
    double cdf(double t) const { return law_->cdf(t); }
    double laplace(double s) const { return law_->laplace(Complex(s, 0.0)).real(); }
    Complex laplace(Complex s) const { return law_->laplace(s); }
    LaplaceFunction laplace_function() const;
    double mean() const { return law_->mean(); }
    double sample(RandomStream& rng) const { return law_->sample(rng); }
    double sample_size_biased(RandomStream& rng) const { return law_->sample_size_biased(rng); }
    std::string describe() const { return law_->describe(); }

    /// True when pdf/cdf come from numerical Laplace inversion.
    bool density_is_approximate() const { return law_->density_is_approximate(); }

    /// pdf on the grid, with origin extrapolation for singular densities.
    GridFunction tabulate_pdf(const GridSpec& grid) const;
    GridFunction tabulate_cdf(const GridSpec& grid) const;

    const detail::SwitchingLaw& law() const { return *law_; }

private:
    std::shared_ptr<const detail::SwitchingLaw> law_;
};

SwitchingDistribution make_exponential(double rate);

/// Gamma with shape k and scale theta: Laplace (1 + theta s)^-k, mean k theta.
SwitchingDistribution make_gamma(double shape, double scale);

/**
 * Law given by a tabulated density. The density must be non-negative with
 * trapezoid mass within 1e-3 of one; it is renormalised exactly. The law is
 * the piecewise-linear interpolant of the table, and its Laplace transform is
 * computed exactly for that interpolant; relative to a density extending
 * past the grid the truncation error at real s is at most exp(-s t_end) (see
 * laplace_truncation_bound). Sampling inverts the CDF.
 */
SwitchingDistribution make_tabulated(const GridFunction& pdf);

/// Bound on the Laplace truncation error of a tabulated law, exp(-s t_end).
double laplace_truncation_bound(const GridFunction& pdf, double s);

/**
 * Geometric compound W = sum_{k=1}^{nu} W~_k with nu geometric on {1, 2, ...}
 * of mean r (success probability 1/r).
 */
class GeometricCompound {
public:
    GeometricCompound(SwitchingDistribution divisor, double r, int talbot_nodes = 32);

    const SwitchingDistribution& divisor() const { return divisor_; }
    double r() const { return r_; }
    double mean() const { return r_ * divisor_.mean(); }

    /// The compound as a switching-time law. Its pdf/cdf are numerical
    /// Laplace inversions and flagged approximate; sampling is exact.
    const SwitchingDistribution& distribution() const { return compound_; }

    double laplace(double s) const { return compound_.laplace(s); }
    double sample(RandomStream& rng) const { return compound_.sample(rng); }

private:
    SwitchingDistribution divisor_;
    double r_;
    SwitchingDistribution compound_;
};

GeometricCompound make_geometric_compound(const SwitchingDistribution& divisor, double r,
                                          int talbot_nodes = 32);

/// psi_W(s) = (psi~(s) / r) / (1 - (1 - 1/r) psi~(s)).
Complex compound_laplace_value(Complex divisor_psi, double r);

}  // namespace switchkit
