#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "switchkit/distributions.hpp"
#include "switchkit/laplace.hpp"

using namespace switchkit;

namespace {
LaplaceFunction rational(double a) {
    return LaplaceFunction([a](Complex s) { return 1.0 / (a + s); });
}
}  // namespace

TEST_CASE("psi <-> L(E) round trip") {
    const auto psi = make_gamma(2.0, 2.0).laplace_function();
    const auto le = expected_laplace_from_psi(psi);
    const auto back = psi_from_expected_laplace(le);
    for (double s : {0.1, 1.0, 10.0}) {
        CHECK(std::abs(back(s) - psi(s)) < 1e-12);
        CHECK(back.valid_at(s));
    }
    // L(E) of Exp(1) is 1 / (s + 2)
    const auto le_exp = expected_laplace_from_psi(make_exponential(1.0).laplace_function());
    CHECK(le_exp(3.0) == doctest::Approx(0.2));
    // sL(E) outside [-1, 1] cannot come from a switching law
    const auto bogus = psi_from_expected_laplace(LaplaceFunction([](Complex s) { return 2.0 / s; }));
    CHECK_FALSE(bogus.valid_at(1.0));
}

TEST_CASE("covariance transform of Exp(1)") {
    // C = e^{-2t} as well, so L(C) = 1 / (s + 2)
    const auto le = expected_laplace_from_psi(make_exponential(1.0).laplace_function());
    const auto lc = covariance_laplace(le, 1.0);
    for (double s : {0.5, 1.0, 4.0}) CHECK(lc(s) == doctest::Approx(1.0 / (s + 2.0)).epsilon(1e-12));
    CHECK_THROWS(covariance_laplace(le, 0.0));
}

TEST_CASE("fixed Talbot inversion") {
    for (double t : {0.1, 0.5, 1.0, 2.5, 5.0}) CHECK(std::abs(talbot_invert(rational(2.0), t) - std::exp(-2.0 * t)) < 1e-10);
    // t e^{-t}; mpmath's Talbot gives 0.149361205103591829 at t = 3
    const LaplaceFunction sq([](Complex s) { return 1.0 / ((s + 1.0) * (s + 1.0)); });
    CHECK(talbot_invert(sq, 3.0) == doctest::Approx(0.149361205103591829).epsilon(1e-10));
    // damped sine: divisor of Gamma(2,2) at r = 2
    const LaplaceFunction ds([](Complex s) { return 1.0 / (2.0 * s * s + 2.0 * s + 1.0); });
    CHECK(talbot_invert(ds, 7.0) == doctest::Approx(std::exp(-3.5) * std::sin(3.5)).epsilon(1e-8));
    CHECK(std::isnan(talbot_invert(rational(2.0), 0.0)));
}

TEST_CASE("grid inversion marks the origin and fills it") {
    const auto res = invert_laplace(rational(2.0), {2.0, 0.1});
    REQUIRE(!res.failed.empty());
    CHECK(res.failed.front() == 0);
    CHECK(res.values[0] == res.values[1]);
    CHECK(res.values.at(1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-10));
    const auto par = invert_laplace(rational(2.0), {2.0, 0.1}, {32, 3});
    CHECK(par.values == res.values);
}

TEST_CASE("complete monotonicity screening") {
    const auto cm = cm_check(rational(1.0), default_cm_grid());
    CHECK(cm.passed);
    CHECK(cm.max_order_checked == 6);
    CHECK(cm.violations.empty());

    // 1/(2s^2+2s+1) has (-1)^4 psi''''(0) = -96
    const LaplaceFunction ds([](Complex s) { return 1.0 / (2.0 * s * s + 2.0 * s + 1.0); });
    const auto bad = cm_check(ds, default_cm_grid());
    CHECK_FALSE(bad.passed);
    bool order_four_at_origin = false;
    for (const auto& v : bad.violations) order_four_at_origin |= (v.order == 4 && v.s < 0.02);
    CHECK(order_four_at_origin);
    const auto low = cm_check(ds, default_cm_grid(), 3);
    CHECK(low.passed);  // orders 0..3 are all fine for this transform near zero

    const nlohmann::json j = to_json(bad);
    CHECK(j.at("passed") == false);
    CHECK(j.at("verdict") == "violation found");
    CHECK(to_json(cm).at("verdict") == "no violation found");
}

TEST_CASE("cm_check validates its inputs") {
    CHECK_THROWS_AS(cm_check(rational(1.0), std::vector<double>{}, 6), std::invalid_argument);
    CHECK_THROWS_AS(cm_check(rational(1.0), default_cm_grid(), -1), std::invalid_argument);
    CHECK_THROWS_AS(cm_check(rational(1.0), std::vector<double>{-1.0}, 2), std::invalid_argument);
}
