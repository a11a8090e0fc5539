#include <doctest.h>

#include <cmath>
#include <numbers>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "switchkit/divisibility.hpp"
#include "switchkit/iia.hpp"

using namespace switchkit;
using fixtures::max_abs_error;

TEST_CASE("built-in covariances carry consistent derivatives") {
    for (const auto& r : {diffusion2d_covariance(), exponential_covariance(), damped_cosine_covariance()}) {
        CAPTURE(r.name);
        CHECK(r.r(0.0) == doctest::Approx(1.0));
        for (double t : {0.3, 1.0, 4.0}) {
            const double h = 1e-5;
            CHECK(r.dr(t) == doctest::Approx((r.r(t + h) - r.r(t - h)) / (2 * h)).epsilon(1e-6));
            CHECK(r.d2r(t) == doctest::Approx((r.dr(t + h) - r.dr(t - h)) / (2 * h)).epsilon(1e-5));
        }
    }
}

TEST_CASE("clipping") {
    const GridSpec grid{10.0, 0.01};
    const auto c = clip_covariance(damped_cosine_covariance(), grid);
    CHECK(c[0] == doctest::Approx(1.0));
    for (std::size_t i = 0; i < c.size(); ++i) {
        const double r = std::cos(c.time(i)) * std::exp(-c.time(i));
        CHECK(std::signbit(c[i]) == std::signbit(r));
    }
    const auto d = clip_covariance(diffusion2d_covariance(), grid);
    CHECK(max_abs_error(d, fixtures::sech_covariance) < 1e-14);
    const auto bad = tabulated_covariance(GridFunction(0.5, {1.0, 1.5, 0.2}));
    CHECK_THROWS_AS(clip_covariance(bad, {1.0, 0.5}), std::invalid_argument);
}

TEST_CASE("screening conditions") {
    const GridSpec grid{40.0, 0.001};
    CHECK(check_iia_conditions(diffusion2d_covariance(), grid).passed);
    const auto damped = check_iia_conditions(damped_cosine_covariance(), grid);
    CHECK_FALSE(damped.passed);
    CHECK_FALSE(damped.find("nonnegative")->passed);
    CHECK_FALSE(damped.notes.empty());  // the excluded origin window is reported
}

TEST_CASE("screening of a tabulated covariance falls back to differences") {
    const auto table = GridFunction::tabulate({40.0, 0.001}, [](double t) { return fixtures::sech(t / 2.0); });
    const auto r = tabulated_covariance(table, "sech table");
    const auto rep = check_iia_conditions(r, {40.0, 0.001});
    CHECK(rep.passed);
    bool noted = false;
    for (const auto& n : rep.notes) noted |= n.find("finite") != std::string::npos;
    CHECK(noted);
}

TEST_CASE("pipeline on the diffusion fixture") {
    const auto res = iia_pipeline(diffusion2d_covariance(), {40.0, 0.001});
    REQUIRE(res.succeeded);
    REQUIRE(res.divisor.has_value());
    REQUIRE(res.switching_law.has_value());
    CHECK(res.covariance_shape.passed);
    CHECK(res.divisor->mu == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-6));
    CHECK(max_abs_error(res.divisor->cdf, fixtures::sech_divisor_cdf) < 1e-6);
    CHECK(max_abs_error(res.divisor->pdf, fixtures::sech_divisor_pdf) < 5e-4);
    CHECK(res.switching_law->mean() == doctest::Approx(2.0 * std::numbers::pi).epsilon(1e-4));
    CHECK(gd_check(res.switching_law->distribution(), 2.0).passed);
    const nlohmann::json j = to_json(res);
    CHECK(j.at("succeeded") == true);
}

TEST_CASE("pipeline rejects the damped cosine at screening") {
    const auto res = iia_pipeline(damped_cosine_covariance(), {40.0, 0.001});
    CHECK_FALSE(res.succeeded);
    CHECK(res.failure.rfind("screen", 0) == 0);
    CHECK_FALSE(res.divisor.has_value());
}

TEST_CASE("pipeline on e^-t passes screening but yields no unit-mass divisor") {
    // (2/pi) arcsin(e^-t) has an infinite second derivative at the origin,
    // so the recovered density misses the mass concentrated there
    const auto res = iia_pipeline(exponential_covariance(), {40.0, 0.001});
    CHECK(res.screen.passed);
    CHECK_FALSE(res.succeeded);
}
