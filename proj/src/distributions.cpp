#include "switchkit/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <boost/math/special_functions/gamma.hpp>

#include "switchkit/errors.hpp"

namespace switchkit {

SwitchingDistribution::SwitchingDistribution(std::shared_ptr<const detail::SwitchingLaw> law)
    : law_(std::move(law)) {
    if (!law_) throw std::invalid_argument("SwitchingDistribution: null law");
}

LaplaceFunction SwitchingDistribution::laplace_function() const {
    return LaplaceFunction([law = law_](Complex s) { return law->laplace(s); });
}

GridFunction SwitchingDistribution::tabulate_pdf(const GridSpec& grid) const {
    return GridFunction::tabulate_density(grid, [this](double t) { return pdf(t); });
}

GridFunction SwitchingDistribution::tabulate_cdf(const GridSpec& grid) const {
    return GridFunction::tabulate(grid, [this](double t) { return cdf(t); });
}

namespace {

std::string num(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

class ExponentialLaw final : public detail::SwitchingLaw {
public:
    explicit ExponentialLaw(double rate) : rate_(rate) {}
    double pdf(double t) const override { return t < 0.0 ? 0.0 : rate_ * std::exp(-rate_ * t); }
    double cdf(double t) const override { return t <= 0.0 ? 0.0 : -std::expm1(-rate_ * t); }
    Complex laplace(Complex s) const override { return rate_ / (rate_ + s); }
    double mean() const override { return 1.0 / rate_; }
    double sample(RandomStream& rng) const override { return rng.exponential() / rate_; }
    double sample_size_biased(RandomStream& rng) const override {
        const double a = rng.exponential();
        const double b = rng.exponential();
        return (a + b) / rate_;
    }
    std::string describe() const override { return "exp(rate=" + num(rate_) + ")"; }

private:
    double rate_;
};

class GammaLaw final : public detail::SwitchingLaw {
public:
    GammaLaw(double shape, double scale) : shape_(shape), scale_(scale) {}
    double pdf(double t) const override {
        if (t < 0.0) return 0.0;
        if (t == 0.0) {
            if (shape_ < 1.0) return std::numeric_limits<double>::infinity();
            return shape_ == 1.0 ? 1.0 / scale_ : 0.0;
        }
        return boost::math::gamma_p_derivative(shape_, t / scale_) / scale_;
    }
    double cdf(double t) const override { return t <= 0.0 ? 0.0 : boost::math::gamma_p(shape_, t / scale_); }
    Complex laplace(Complex s) const override { return std::pow(1.0 + scale_ * s, -shape_); }
    double mean() const override { return shape_ * scale_; }
    double sample(RandomStream& rng) const override { return scale_ * rng.gamma(shape_); }
    double sample_size_biased(RandomStream& rng) const override { return scale_ * rng.gamma(shape_ + 1.0); }
    std::string describe() const override {
        return "gamma(shape=" + num(shape_) + ",scale=" + num(scale_) + ")";
    }

private:
    double shape_;
    double scale_;
};

constexpr long kSizeBiasedProposalCap = 1'000'000;

class TabulatedLaw final : public detail::SwitchingLaw {
public:
    TabulatedLaw(GridFunction pdf, GridFunction cdf, double mean, double envelope)
        : pdf_(std::move(pdf)), cdf_(std::move(cdf)), mean_(mean), envelope_(envelope) {}
    double pdf(double t) const override { return (t < 0.0 || t > pdf_.t_end()) ? 0.0 : pdf_.at(t); }
    double cdf(double t) const override {
        if (t <= 0.0) return 0.0;
        if (t >= cdf_.t_end()) return 1.0;
        return cdf_.at(t);
    }
    // Exact transform of the piecewise-linear density: on each cell
    // int_0^h (f_i + (f_{i+1} - f_i) u / h) e^{-s (t_i + u)} du = e^{-s t_i} (f_i a + f_{i+1} b).
    Complex laplace(Complex s) const override {
        const double h = pdf_.step();
        const auto [i0, i1] = cell_moments(s, h);
        const Complex a = i0 - i1 / h;
        const Complex b = i1 / h;
        Complex acc(0.0, 0.0);
        for (std::size_t i = 0; i + 1 < pdf_.size(); ++i) {
            if (pdf_[i] == 0.0 && pdf_[i + 1] == 0.0) continue;
            acc += std::exp(-s * pdf_.time(i)) * (pdf_[i] * a + pdf_[i + 1] * b);
        }
        return acc;
    }
    double mean() const override { return mean_; }
    double sample(RandomStream& rng) const override {
        const double u = rng.uniform();
        const auto v = cdf_.values();
        const auto it = std::upper_bound(v.begin(), v.end(), u);
        if (it == v.begin()) return 0.0;
        if (it == v.end()) return cdf_.t_end();
        const auto i = static_cast<std::size_t>(it - v.begin()) - 1;
        const double lo = v[i];
        const double hi = v[i + 1];
        const double w = hi > lo ? (u - lo) / (hi - lo) : 0.0;
        return cdf_.time(i) + w * cdf_.step();
    }
    double sample_size_biased(RandomStream& rng) const override {
        const double t_end = pdf_.t_end();
        for (long k = 0; k < kSizeBiasedProposalCap; ++k) {
            const double t = rng.uniform() * t_end;
            if (rng.uniform() * envelope_ <= t * pdf_.at(t)) return t;
        }
        throw numeric_error("tabulated size-biased sampler exceeded its proposal cap");
    }
    std::string describe() const override { return "table(" + std::to_string(pdf_.size()) + " points)"; }

private:
    GridFunction pdf_;
    GridFunction cdf_;
    double mean_;
    double envelope_;

    // int_0^h e^{-su} du and int_0^h u e^{-su} du, by series when |sh| is small
    static std::pair<Complex, Complex> cell_moments(Complex s, double h) {
        const Complex x = s * h;
        if (std::abs(x) < 0.5) {
            Complex i0(0.0, 0.0), i1(0.0, 0.0), term(1.0, 0.0);  // term = (-x)^k / k!
            for (int k = 0; k < 16; ++k) {
                i0 += term / static_cast<double>(k + 1);
                i1 += term / static_cast<double>(k + 2);
                term *= -x / static_cast<double>(k + 1);
            }
            return {h * i0, h * h * i1};
        }
        const Complex e = std::exp(-x);
        return {(1.0 - e) / s, (1.0 - e * (1.0 + x)) / (s * s)};
    }
};

class CompoundLaw final : public detail::SwitchingLaw {
public:
    CompoundLaw(SwitchingDistribution divisor, double r, int nodes)
        : divisor_(std::move(divisor)), r_(r), nodes_(nodes),
          psi_([this](Complex s) { return laplace(s); }),
          cdf_transform_([this](Complex s) { return laplace(s) / s; }) {}

    double pdf(double t) const override {
        if (t < 0.0) return 0.0;
        if (t == 0.0) return divisor_.pdf(0.0) / r_;
        return talbot_invert(psi_, t, nodes_);
    }
    double cdf(double t) const override {
        if (t <= 0.0) return 0.0;
        return talbot_invert(cdf_transform_, t, nodes_);
    }
    Complex laplace(Complex s) const override { return compound_laplace_value(divisor_.laplace(s), r_); }
    double mean() const override { return r_ * divisor_.mean(); }
    double sample(RandomStream& rng) const override {
        const std::uint64_t count = rng.geometric(1.0 / r_);
        double total = 0.0;
        for (std::uint64_t k = 0; k < count; ++k) total += divisor_.sample(rng);
        return total;
    }
    // Length-biasing a geometric sum: the count becomes G1 + G2 - 1 and one
    // summand is itself length-biased.
    double sample_size_biased(RandomStream& rng) const override {
        const double p = 1.0 / r_;
        const std::uint64_t count = rng.geometric(p) + rng.geometric(p) - 1;
        double total = divisor_.sample_size_biased(rng);
        for (std::uint64_t k = 1; k < count; ++k) total += divisor_.sample(rng);
        return total;
    }
    std::string describe() const override {
        return "compound(r=" + num(r_) + ",divisor=" + divisor_.describe() + ")";
    }
    bool density_is_approximate() const override { return true; }

private:
    SwitchingDistribution divisor_;
    double r_;
    int nodes_;
    LaplaceFunction psi_;
    LaplaceFunction cdf_transform_;
};

}  // namespace

SwitchingDistribution make_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw std::invalid_argument("exp: rate must be positive");
    return SwitchingDistribution(std::make_shared<ExponentialLaw>(rate));
}

SwitchingDistribution make_gamma(double shape, double scale) {
    if (!(shape > 0.0) || !std::isfinite(shape)) throw std::invalid_argument("gamma: shape must be positive");
    if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("gamma: scale must be positive");
    return SwitchingDistribution(std::make_shared<GammaLaw>(shape, scale));
}

SwitchingDistribution make_tabulated(const GridFunction& pdf) {
    if (pdf.size() < 3) throw std::invalid_argument("table: need at least 3 points");
    for (double v : pdf.values()) {
        if (v < 0.0) throw std::invalid_argument("table: density has negative values");
    }
    const double mass = integral(pdf);
    if (!(std::abs(mass - 1.0) <= 1e-3)) {
        std::ostringstream os;
        os << "table: density mass " << mass << " differs from 1 by more than 1e-3";
        throw std::invalid_argument(os.str());
    }
    GridFunction normalized = (1.0 / mass) * pdf;
    GridFunction cdf = cumulative_integral(normalized);
    const double mean = integral(normalized.map([](double t, double v) { return t * v; }));
    if (!(mean > 0.0)) throw std::invalid_argument("table: mean must be positive");
    double envelope = 0.0;
    for (std::size_t i = 0; i < normalized.size(); ++i)
        envelope = std::max(envelope, normalized.time(i) * normalized[i]);
    // t * (linear interpolant) can overshoot the grid maximum inside a cell
    envelope *= 1.0 + 2.0 * normalized.step() / std::max(normalized.t_end(), normalized.step());
    envelope += 1e-300;
    return SwitchingDistribution(std::make_shared<TabulatedLaw>(normalized, cdf, mean, envelope * 1.05));
}

double laplace_truncation_bound(const GridFunction& pdf, double s) { return std::exp(-s * pdf.t_end()); }

Complex compound_laplace_value(Complex divisor_psi, double r) {
    return (divisor_psi / r) / (1.0 - (1.0 - 1.0 / r) * divisor_psi);
}

namespace {
double checked_r(double r) {
    if (!(r > 1.0) || !std::isfinite(r)) throw std::invalid_argument("compound: r must be > 1");
    return r;
}
}  // namespace

GeometricCompound::GeometricCompound(SwitchingDistribution divisor, double r, int talbot_nodes)
    : divisor_(std::move(divisor)), r_(checked_r(r)),
      compound_(std::make_shared<CompoundLaw>(divisor_, r_, talbot_nodes)) {}

GeometricCompound make_geometric_compound(const SwitchingDistribution& divisor, double r, int talbot_nodes) {
    return GeometricCompound(divisor, r, talbot_nodes);
}

}  // namespace switchkit
