// Acceptance run: one line per criterion, non-zero exit if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "switchkit/distributions.hpp"
#include "switchkit/divisibility.hpp"
#include "switchkit/dsl.hpp"
#include "switchkit/iia.hpp"
#include "switchkit/relations.hpp"
#include "switchkit/simulation.hpp"

using namespace switchkit;

namespace {

struct Outcome {
    bool passed;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

template <class Fn>
double max_error(const GridFunction& g, Fn exact, double from = 0.0, double to = 1e300) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double t = g.time(i);
        if (t >= from && t <= to) worst = std::max(worst, std::abs(g[i] - exact(t)));
    }
    return worst;
}

double exp_e(double t) { return std::exp(-2.0 * t); }
double gamma_e(double t) { return std::numbers::sqrt2 * std::sin((2.0 * t + std::numbers::pi) / 4.0) * std::exp(-t / 2.0); }
double gamma_c(double t) { return std::cos(t / 2.0) * std::exp(-t / 2.0); }
double sech(double x) { return 1.0 / std::cosh(x); }
double sech_cdf(double t) { return 1.0 - sech(t / 2.0); }
double sech_pdf(double t) { return 0.5 * std::tanh(t / 2.0) * sech(t / 2.0); }

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Outcome exponential_closed_form() {
    const auto start = std::chrono::steady_clock::now();
    const auto e = expected_value_series(make_exponential(1.0), {5.0, 0.001});
    const double secs = seconds_since(start);
    const double err = max_error(e.values, exp_e);
    return {err <= 1e-4 && secs <= 10.0, fmt("max|E-e^{-2t}| = %.3e (<= 1e-4), %.2f s (<= 10 s)", err, secs)};
}

Outcome gamma_closed_form() {
    const auto e = expected_value_series(make_gamma(2.0, 2.0), {8.0, 0.001});
    const double err_e = max_error(e.values, gamma_e);
    const double err_c = max_error(covariance_from_expected(e.values, 4.0), gamma_c);
    return {err_e <= 1e-3 && err_c <= 1e-3, fmt("max|E err| = %.3e, max|C err| = %.3e (both <= 1e-3)", err_e, err_c)};
}

Outcome monte_carlo_agreement() {
    const auto start = std::chrono::steady_clock::now();
    const GridSpec grid{4.0, 0.5};
    const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
    double worst = 0.0;  // in standard errors
    auto score = [&](const MonteCarloEstimate& est, double (*exact)(double)) {
        for (double t : times) {
            const auto i = static_cast<std::size_t>(std::lround(t / grid.h));
            worst = std::max(worst, std::abs(est.value[i] - exact(t)) / est.standard_error[i]);
        }
    };
    score(estimate_expected_value(make_exponential(1.0), grid, 100000, 1), exp_e);
    score(estimate_expected_value(make_gamma(2.0, 2.0), grid, 100000, 2), gamma_e);
    score(estimate_covariance(make_exponential(1.0), grid, 100000, 3), exp_e);  // C = e^{-2t} too
    score(estimate_covariance(make_gamma(2.0, 2.0), grid, 100000, 4), gamma_c);
    const double secs = seconds_since(start);
    return {worst <= 4.0 && secs <= 60.0, fmt("worst deviation %.2f stderr (<= 4), %.2f s (<= 60 s)", worst, secs)};
}

Outcome gd2_equivalence() {
    struct Case {
        const char* spec;
        bool expected;
    };
    std::string detail;
    bool ok = true;
    for (const Case c : {Case{"exp(rate=1)", true}, Case{"compound(r=2,divisor=exp(rate=2))", true},
                         Case{"gamma(shape=2,scale=2)", false}}) {
        const auto d = parse_distribution(c.spec);
        const bool gd = gd_check(d, 2.0).passed;
        const bool shape = check_expected_shape(expected_value_series(d, {30.0, 0.005}).values).passed;
        ok = ok && gd == c.expected && shape == gd;
        detail += fmt("%s%s gd=%d shape=%d", detail.empty() ? "" : "; ", c.spec, gd, shape);
    }
    return {ok, detail};
}

Outcome covariance_recovery_outcome(const DivisorRecovery& rec) {
    const double mu_rel = std::abs(rec.mu - kTwoPi) / kTwoPi;
    const double cdf_err = max_error(rec.cdf, sech_cdf);
    const double pdf_err = max_error(rec.pdf, sech_pdf);
    return {mu_rel <= 1e-3 && cdf_err <= 1e-4 && pdf_err <= 5e-4,
            fmt("mu rel err %.2e (<= 1e-3), F~ err %.2e (<= 1e-4), f~ err %.2e (<= 5e-4)", mu_rel, cdf_err, pdf_err)};
}

Outcome recovery_from_covariance() {
    const auto table = GridFunction::tabulate({40.0, 0.001}, [](double t) { return 2.0 / std::numbers::pi * std::asin(sech(t / 2.0)); });
    return covariance_recovery_outcome(divisor_from_covariance(table));
}

Outcome mean_identity() {
    const GridSpec grid{40.0, 0.005};
    const auto e1 = expected_value_series(make_exponential(1.0), grid);
    const auto e2 = expected_value_series(make_gamma(2.0, 2.0), grid);
    const double m1 = mean_from_expected(e1.values, 2.0 * e1.truncation_bound).value;
    const double m2 = mean_from_expected(e2.values, 2.0 * e2.truncation_bound).value;
    return {std::abs(m1 - 1.0) <= 1e-4 && std::abs(m2 - 4.0) <= 1e-3,
            fmt("Exp(1): %.7f (1 +- 1e-4), Gamma(2,2): %.7f (4 +- 1e-3)", m1, m2)};
}

Outcome laplace_round_trips() {
    double worst = 0.0;
    for (const char* spec : {"exp(rate=1)", "gamma(shape=2,scale=2)", "compound(r=2,divisor=exp(rate=2))"}) {
        const auto psi = parse_distribution(spec).laplace_function();
        const auto back = psi_from_expected_laplace(expected_laplace_from_psi(psi));
        for (double s : {0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(back(s) - psi(s)));
    }
    const LaplaceFunction fn([](Complex s) { return 1.0 / (2.0 + s); });
    const auto inv = invert_laplace(fn, {5.0, 0.01});
    const double inv_err = max_error(inv.values, exp_e, 0.1, 5.0);
    return {worst <= 1e-12 && inv_err <= 1e-6,
            fmt("psi round trip %.2e (<= 1e-12), inversion of 1/(2+s) %.2e (<= 1e-6)", worst, inv_err)};
}

Outcome divisibility_algebra() {
    double worst = 0.0;
    for (double r : {1.5, 2.0, 3.0}) {
        const GeometricCompound c(make_gamma(2.0, 0.5), r);
        const auto extracted = divisor_laplace(c.distribution().laplace_function(), r);
        for (double s : {0.1, 1.0, 10.0}) worst = std::max(worst, std::abs(extracted(s) - c.divisor().laplace(s)));
    }
    const auto d = make_exponential(1.0);
    const bool at2 = gd_check(d, 2.0).passed;
    const bool at125 = gd_check(d, 1.25).passed;
    const bool at15 = gd_check(d, 1.5).passed;
    return {worst <= 1e-10 && at2 && at125 && at15,
            fmt("extract(compound) err %.2e (<= 1e-10); Exp(1) GD(2)=%d GD(1.25)=%d GD(1.5)=%d", worst, at2, at125, at15)};
}

Outcome iia_pipeline_outcome() {
    const auto ok = iia_pipeline(diffusion2d_covariance(), {40.0, 0.001});
    const auto rejected = iia_pipeline(damped_cosine_covariance(), {40.0, 0.001});
    const bool screened_out = !rejected.screen.passed && !rejected.succeeded;
    if (!ok.succeeded || !ok.divisor) return {false, "diffusion2d pipeline failed: " + ok.failure};
    const Outcome rec = covariance_recovery_outcome(*ok.divisor);
    return {ok.screen.passed && rec.passed && screened_out,
            "diffusion2d: " + rec.detail + fmt("; cos(t)e^{-t} rejected at screening: %d", screened_out)};
}

Outcome proof_path_cross_check() {
    double worst = 0.0;
    for (const auto& d : {make_exponential(1.0), make_gamma(2.0, 2.0)}) {
        const GridSpec grid{20.0, 0.002};
        const auto e = expected_value_series(d, grid).values;
        const auto a = covariance_from_expected(e, d.mean());
        const auto b = covariance_from_delay(e, d.tabulate_cdf(grid), d.mean());
        for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    }
    return {worst <= 1e-3, fmt("max route difference %.2e (<= 1e-3)", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"exponential closed form", exponential_closed_form},
        {"gamma closed form and covariance bridge", gamma_closed_form},
        {"Monte Carlo oracle agreement", monte_carlo_agreement},
        {"GD(2) equivalence", gd2_equivalence},
        {"recovery from covariance", recovery_from_covariance},
        {"mean identity", mean_identity},
        {"Laplace round trips", laplace_round_trips},
        {"divisibility algebra", divisibility_algebra},
        {"IIA pipeline", iia_pipeline_outcome},
        {"delay-route cross-check", proof_path_cross_check},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o{false, ""};
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failures;
        std::printf("[%s] %2d %s: %s\n", o.passed ? "PASS" : "FAIL", index, name, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", index - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
