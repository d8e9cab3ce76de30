#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chemotax/model.hpp"
#include "oracles.hpp"

using namespace chemotax;

TEST_SUITE("model") {

TEST_CASE("parameter validation") {
    CHECK_NOTHROW(validate(ModelParams{1.0, 1.0, 0.5, 0.05}));
    CHECK_NOTHROW(validate(ModelParams{1.0, 0.0, 0.0, 0.1})); // d = 0 and chi = 0 are admissible
    CHECK_THROWS_AS(validate(ModelParams{0.0, 1.0, 0.5, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{-1.0, 1.0, 0.5, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, -0.1, 0.5, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, -0.1, 0.05}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 1.0, 0.05}), std::invalid_argument); // chi < 1 strict
    CHECK_THROWS_AS(validate(ModelParams{1.0, 1.0, 0.5, 0.0}), std::invalid_argument);
}

TEST_CASE("response closed form and limits") {
    CHECK(response(0.0, 0.5, 0.05) == 0.0);
    // chi = 0.5, delta = 0.05, x = 0.05 -> 0.5 tanh(1); frozen reference value.
    CHECK(response(0.05, 0.5, 0.05) == doctest::Approx(0.38079707797788244).epsilon(1e-15));
    // Saturation: |F| < chi mathematically, but tanh rounds to exactly 1 in
    // double precision beyond |x/delta| ~ 19, so the attainable bound is <=.
    CHECK(response(1e3, 0.5, 0.05) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::fabs(response(1e3, 0.5, 0.05)) <= 0.5);
    CHECK(std::fabs(response(-1e3, 0.5, 0.05)) <= 0.5);
    CHECK(std::fabs(response(0.9, 0.5, 0.05)) < 0.5); // strict below fp saturation
}

TEST_CASE("response is odd, bounded and increasing") {
    oracles::TestRng rng(2024);
    const double chi = 0.7, delta = 0.03;
    double prev_x = -50.0, prev_f = response(prev_x, chi, delta);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform(-50.0, 50.0);
        const double f = response(x, chi, delta);
        CHECK(std::fabs(f) <= chi);
        if (std::fabs(x) < 16.0 * delta) CHECK(std::fabs(f) < chi);
        CHECK(response(-x, chi, delta) == doctest::Approx(-f).epsilon(1e-15));
        if (x > prev_x) CHECK(f >= prev_f); // strict on distinct args; ties only at saturation round-off
        prev_x = x;
        prev_f = f;
    }
}

TEST_CASE("kernel complements the response to the last bit") {
    oracles::TestRng rng(7);
    for (int i = 0; i < 200; ++i) {
        // K = 1 - F; re-adding F can deviate by at most half an ulp of 1.
        const double x = rng.uniform(-10.0, 10.0);
        CHECK(std::fabs(tumbling_kernel(x, 0.5, 0.05) + response(x, 0.5, 0.05) - 1.0) <= 1.2e-16);
    }
    CHECK(tumbling_kernel(0.0, 0.5, 0.05) == 1.0);
    CHECK(tumbling_kernel(-1e4, 0.5, 0.05) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(tumbling_kernel(0.05, 0.5, 0.05) == doctest::Approx(1.0 - 0.38079707797788244).epsilon(1e-15));
}

TEST_CASE("logistic growth sign structure") {
    CHECK(logistic_growth(1.0) == 0.0);
    CHECK(logistic_growth(0.5) == 0.5);
    CHECK(logistic_growth(2.0) == -1.0);
    CHECK(logistic_growth(0.0) == 1.0);
}

TEST_CASE("stiffness ratio of the four reference parameter sets") {
    // The scaled triple (d/k, chi/sqrt k, sqrt k * delta) fixes the ratio
    // independently of k.
    const ScaledParams a{1.0, 0.5, 0.05};
    const ScaledParams b{1.0, 0.5, 0.0625};
    const ScaledParams c{0.7, 0.5, 0.0625};
    const ScaledParams d{1.0, 0.5, 0.1};
    for (double k : {0.1, 0.5, 1.0, 2.0}) {
        CHECK(stiffness_ratio(to_model(a, k)) == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(stiffness_ratio(to_model(b, k)) == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(stiffness_ratio(to_model(c, k)) == doctest::Approx(8.0).epsilon(1e-12));
        CHECK(stiffness_ratio(to_model(d, k)) == doctest::Approx(5.0).epsilon(1e-12));
    }
    // The scaled spelling still has to produce a valid amplitude: at k = 10
    // these sets imply chi = 0.5 sqrt(10) >= 1, which is rejected.
    CHECK_THROWS_AS(to_model(a, 10.0), std::invalid_argument);
    CHECK(stiffness_ratio(ModelParams{1.0, 1.0, 0.5, 0.05}) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(stiffness_ratio(ModelParams{3.0, 1.0, 0.0, 0.05}) == 0.0);
}

TEST_CASE("scaled/raw conversion round trip") {
    oracles::TestRng rng(99);
    for (int i = 0; i < 200; ++i) {
        // chi = chi_over_sqrt_k * sqrt(k) must stay below 1 over the k range.
        const ScaledParams s{rng.uniform(0.05, 5.0), rng.uniform(0.01, 0.45), rng.uniform(0.01, 1.0)};
        const double k = rng.uniform(0.05, 4.0);
        const ModelParams p = to_model(s, k);
        CHECK(p.k == k);
        const ScaledParams back = to_scaled(p);
        CHECK(back.d_over_k == doctest::Approx(s.d_over_k).epsilon(1e-12));
        CHECK(back.chi_over_sqrt_k == doctest::Approx(s.chi_over_sqrt_k).epsilon(1e-12));
        CHECK(back.sqrt_k_delta == doctest::Approx(s.sqrt_k_delta).epsilon(1e-12));
        // Ratio invariance under the parametrization.
        CHECK(stiffness_ratio(p) ==
              doctest::Approx(s.chi_over_sqrt_k / s.sqrt_k_delta).epsilon(1e-12));
    }
}

TEST_CASE("response slope at rest") {
    CHECK(response_slope(ModelParams{1.0, 1.0, 0.5, 0.05}) == doctest::Approx(10.0).epsilon(1e-15));
    // Finite-difference cross-check of the slope.
    const ModelParams p{1.0, 1.0, 0.3, 0.02};
    const double h = 1e-8;
    const double fd = (response(h, p) - response(-h, p)) / (2.0 * h);
    CHECK(fd == doctest::Approx(response_slope(p)).epsilon(1e-6));
}

} // TEST_SUITE
