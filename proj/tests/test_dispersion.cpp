#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "chemotax/dispersion.hpp"
#include "chemotax/model.hpp"
#include "oracles.hpp"

using namespace chemotax;

namespace {

// Parameter-table sets in scaled form (d/k, chi/sqrt k, sqrt k * delta).
ModelParams table_set(char which, double k) {
    ScaledParams s{1.0, 0.5, 0.1};
    switch (which) {
        case 'A': s = {1.0, 0.5, 0.05}; break;
        case 'B': s = {1.0, 0.5, 0.0625}; break;
        case 'C': s = {0.7, 0.5, 0.0625}; break;
        case 'D': s = {1.0, 0.5, 0.1}; break;
    }
    return to_model(s, k);
}

// Frozen with 40-digit arithmetic, independent of the library's root finding.
constexpr double kCrit_k1_d1 = 9.038568837868272;
constexpr double kCrit_k1_d1_argmin = 1.2039807458949527;
constexpr double kCrit_k2_d2 = 10.12477002993258;
constexpr double kCrit_k01_d01 = 7.671538163747059;
constexpr double kCrit_k01_d01_argmin = 4.08995;
constexpr double kCrit_k1_d07 = 7.370116061151447;
constexpr double kCrit_k2_d14 = 8.297758023488261;
constexpr double kRhs_sqrt3_k1_d1 = 10.116332463650294;
constexpr double kRootB_xi = 0.397680778214468;    // set B, k=0.1, lambda=4
constexpr double kRootB_mu1 = 0.0583186795184123;  // set B, k=0.1, lambda=4
constexpr double kRootD_mu1 = -0.46705694288455936; // set D, k=1, lambda=1.2

} // namespace

TEST_SUITE("dispersion") {

TEST_CASE("phi: endpoint values, series continuity, monotonicity") {
    CHECK(phi(0.0) == 1.0);
    CHECK(phi(1.0) == doctest::Approx(std::atan(1.0)).epsilon(1e-15));

    // Series and direct branches agree across the switch at xi = 1e-4.
    const double below = phi(1e-4 * (1.0 - 1e-9));
    const double above = phi(1e-4 * (1.0 + 1e-9));
    CHECK(std::fabs(below - above) < 1e-12);
    CHECK(below == doctest::Approx(1.0 - 1e-8 / 3.0).epsilon(1e-12));

    const double xs[] = {0.0, 1e-6, 1e-4, 1e-2, 0.5, 1.0, 5.0, 50.0, 1e4};
    for (std::size_t i = 1; i < sizeof(xs) / sizeof(xs[0]); ++i)
        CHECK(phi(xs[i]) < phi(xs[i - 1]));

    CHECK_THROWS_AS(phi(-0.5), std::invalid_argument);
}

TEST_CASE("psi: zero at beta=1, value at origin, pole rejected") {
    CHECK(psi(0.3, 2.0, 1.0) == 0.0);
    CHECK(psi(0.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-15)); // (1-b)/(-b) = 1 - 1/b
    CHECK(psi(1.0, 1.0, 1.1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(psi(1.0, 2.0, 2.0), std::domain_error);
}

TEST_CASE("dispersion_aux: closed forms and domain") {
    const ModelParams p = table_set('B', 0.1);
    const DispersionAux a = dispersion_aux(4.0, kRootB_mu1, p);
    CHECK(a.alpha == doctest::Approx(2.25).epsilon(1e-13));              // (1-k)/(k lambda)
    CHECK(a.beta == doctest::Approx(0.8 / 0.26).epsilon(1e-12));         // F'/(k(1+d l^2))
    CHECK(a.xi == doctest::Approx(kRootB_xi).epsilon(1e-10));

    CHECK_THROWS_AS(dispersion_aux(4.0, -10.0, ModelParams{}), std::domain_error);
    CHECK_THROWS_AS(dispersion_aux(4.0, -1.0, ModelParams{}), std::domain_error); // 1 + k mu1 == 0
    CHECK_THROWS_AS(dispersion_aux(0.0, 0.0, ModelParams{}), std::invalid_argument);
}

TEST_CASE("instability_rhs: frozen value, small-argument branch, divergences") {
    CHECK(instability_rhs(std::sqrt(3.0), 1.0, 1.0) ==
          doctest::Approx(kRhs_sqrt3_k1_d1).epsilon(1e-12));

    // (rhs - 1) * u^2/3 tends to 1 as u -> 0 and must cross the branch switch
    // at u = 1e-4 without a jump. The direct branch carries ~1e-8 relative
    // cancellation noise right at the boundary, hence the 1e-6 tolerance.
    auto scaled = [](double lambda) { return (instability_rhs(lambda, 1.0, 0.0) - 1.0) * lambda * lambda / 3.0; };
    const double below = scaled(1e-4 * (1.0 - 1e-9));
    const double above = scaled(1e-4 * (1.0 + 1e-9));
    CHECK(below == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(above == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::fabs(below - above) < 1e-6);

    CHECK(instability_rhs(1e3, 1.0, 1.0) > 1e6);  // diffusive penalty ~ d lambda^2
    CHECK(instability_rhs(1e-6, 1.0, 1.0) > 1e9); // ~ 3/(k lambda^2)
    CHECK(instability_rhs(1.0, 1.0, 0.5) < instability_rhs(1.0, 1.0, 1.5));

    CHECK_THROWS_AS(instability_rhs(-1.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(instability_rhs(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(instability_rhs(1.0, 1.0, -0.1), std::invalid_argument);
}

TEST_CASE("critical_stiffness: frozen minima of the stability boundary") {
    const CriticalCurvePoint c11 = critical_stiffness(1.0, 1.0);
    CHECK(c11.critical_stiffness == doctest::Approx(kCrit_k1_d1).epsilon(1e-9));
    CHECK(c11.lambda_argmin == doctest::Approx(kCrit_k1_d1_argmin).epsilon(1e-8));

    CHECK(critical_stiffness(2.0, 2.0).critical_stiffness ==
          doctest::Approx(kCrit_k2_d2).epsilon(1e-9));
    const CriticalCurvePoint c01 = critical_stiffness(0.1, 0.1);
    CHECK(c01.critical_stiffness == doctest::Approx(kCrit_k01_d01).epsilon(1e-9));
    CHECK(c01.lambda_argmin == doctest::Approx(kCrit_k01_d01_argmin).epsilon(1e-4));
    CHECK(critical_stiffness(1.0, 0.7).critical_stiffness ==
          doctest::Approx(kCrit_k1_d07).epsilon(1e-9));
    CHECK(critical_stiffness(2.0, 1.4).critical_stiffness ==
          doctest::Approx(kCrit_k2_d14).epsilon(1e-9));

    // The reported argmin is a local minimum of the boundary curve.
    for (double bump : {0.999, 1.001}) {
        CHECK(instability_rhs(c11.lambda_argmin * bump, 1.0, 1.0) >=
              c11.critical_stiffness - 1e-12);
    }
    CHECK(c11.critical_stiffness > 1.0);

    // Boundary minimum grows with diffusivity.
    CHECK(critical_stiffness(1.0, 0.5).critical_stiffness < kCrit_k1_d1);
    CHECK(kCrit_k1_d1 < critical_stiffness(1.0, 2.0).critical_stiffness);

    CHECK_THROWS_AS(critical_stiffness(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(critical_stiffness(0.0, 1.0), std::invalid_argument);
}

TEST_CASE("parameter table: stiffness ratio against the frozen thresholds") {
    // Set A, ratio 10: unstable at k=1, stable at k=2.
    CHECK(stiffness_ratio(table_set('A', 1.0)) == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(stiffness_ratio(table_set('A', 1.0)) > kCrit_k1_d1);
    CHECK(stiffness_ratio(table_set('A', 2.0)) < kCrit_k2_d2);
    // Set B, ratio 8: unstable at k=0.1, stable at k=1.
    CHECK(stiffness_ratio(table_set('B', 0.1)) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(stiffness_ratio(table_set('B', 0.1)) > kCrit_k01_d01);
    CHECK(stiffness_ratio(table_set('B', 1.0)) < kCrit_k1_d1);
    // Set C, ratio 8 at reduced diffusivity: unstable at k=1, stable at k=2.
    CHECK(stiffness_ratio(table_set('C', 1.0)) > kCrit_k1_d07);
    CHECK(stiffness_ratio(table_set('C', 2.0)) < kCrit_k2_d14);
    // Set D, ratio 5: stable at k=1.
    CHECK(stiffness_ratio(table_set('D', 1.0)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(stiffness_ratio(table_set('D', 1.0)) < kCrit_k1_d1);
}

TEST_CASE("growth_rate: frozen roots of the real branch") {
    const ModelParams b = table_set('B', 0.1);
    const DispersionResult rb = growth_rate(4.0, b);
    REQUIRE(rb.xi.has_value());
    REQUIRE(rb.mu1.has_value());
    CHECK(*rb.xi == doctest::Approx(kRootB_xi).epsilon(1e-9));
    CHECK(*rb.mu1 == doctest::Approx(kRootB_mu1).epsilon(1e-9));
    CHECK(rb.mu2 == 0.0);
    CHECK(rb.unstable);
    CHECK(*rb.mu1 == doctest::Approx(4.0 / *rb.xi - 1.0 / b.k).epsilon(1e-12));

    // Both closed-form eigenvalue conditions vanish at the root.
    CHECK(std::fabs(residual_i1(*rb.mu1, 0.0, 4.0, b)) < 1e-9);
    CHECK(std::fabs(residual_i2(*rb.mu1, 0.0, 4.0, b)) < 1e-15);
    // ... and so do the direct integral definitions.
    CHECK(std::fabs(oracles::integral_condition_real(*rb.mu1, 0.0, 4.0, b)) < 1e-8);
    CHECK(std::fabs(oracles::integral_condition_imag(*rb.mu1, 0.0, 4.0, b)) < 1e-8);

    const ModelParams d = table_set('D', 1.0);
    const DispersionResult rd = growth_rate(1.2, d);
    REQUIRE(rd.mu1.has_value());
    CHECK(*rd.mu1 == doctest::Approx(kRootD_mu1).epsilon(1e-9));
    CHECK(!rd.unstable);
    CHECK(std::fabs(residual_i1(*rd.mu1, 0.0, 1.2, d)) < 1e-9);
}

TEST_CASE("growth_rate: degenerate beta = 1 branch") {
    // k < 1: chi/delta = k(1 + d lambda^2) exactly at lambda = 1.
    ModelParams p;
    p.k = 0.5;
    p.d = 1.0;
    p.chi = 0.4;
    p.delta = 0.4;
    const DispersionResult r = growth_rate(1.0, p);
    REQUIRE(r.mu1.has_value());
    CHECK(*r.mu1 == -1.0);
    REQUIRE(r.xi.has_value());
    CHECK(*r.xi == doctest::Approx(1.0).epsilon(1e-14)); // k lambda/(1-k)
    CHECK(!r.unstable);

    // k >= 1: the xi shortcut is meaningless and must be absent.
    ModelParams q;
    q.k = 1.0;
    q.d = 1.0;
    q.chi = 0.5;
    q.delta = 0.25;
    const DispersionResult s = growth_rate(1.0, q);
    REQUIRE(s.mu1.has_value());
    CHECK(*s.mu1 == -1.0);
    CHECK(!s.xi.has_value());
    CHECK(!s.unstable);
}

TEST_CASE("growth_rate: limits and rootless branch") {
    // lambda -> 0 at k = 1: xi settles at a fixed root, so mu1 -> -1/k.
    const DispersionResult tiny = growth_rate(1e-8, table_set('A', 1.0));
    REQUIRE(tiny.mu1.has_value());
    CHECK(*tiny.mu1 == doctest::Approx(-1.0).epsilon(1e-6));

    // Far beyond the band the real branch loses its root entirely.
    const DispersionResult far = growth_rate(100.0, table_set('B', 0.1));
    CHECK(!far.xi.has_value());
    CHECK(!far.mu1.has_value());
    CHECK(!far.unstable);

    CHECK_THROWS_AS(growth_rate(0.0, ModelParams{}), std::invalid_argument);
}

TEST_CASE("residuals: parity in mu2 and domain") {
    const ModelParams p = table_set('B', 0.1);
    oracles::TestRng rng(0x7151351u);
    for (int i = 0; i < 20; ++i) {
        const double mu1 = rng.uniform(-0.5 / p.k, 1.0);
        const double mu2 = rng.uniform(0.05, 1.5);
        const double lambda = rng.uniform(0.5, 8.0);
        CHECK(residual_i1(mu1, mu2, lambda, p) ==
              doctest::Approx(residual_i1(mu1, -mu2, lambda, p)).epsilon(1e-12));
        CHECK(residual_i2(mu1, mu2, lambda, p) ==
              doctest::Approx(-residual_i2(mu1, -mu2, lambda, p)).epsilon(1e-12));
    }
    // The odd condition holds identically on the mu2 = 0 branch.
    CHECK(residual_i2(0.3, 0.0, 2.0, p) == 0.0);

    CHECK_THROWS_AS(residual_i1(-2.0, 0.0, 1.0, ModelParams{}), std::domain_error);
    CHECK_THROWS_AS(residual_i2(-2.0, 0.0, 1.0, ModelParams{}), std::domain_error);
}

TEST_CASE("residuals: closed forms match the direct integral definitions") {
    oracles::TestRng rng(0xa5a5a5a5u);
    int tested = 0;
    while (tested < 100) {
        const double k = std::exp(rng.uniform(std::log(0.1), std::log(2.0)));
        const ScaledParams s{rng.uniform(0.3, 3.0), rng.uniform(0.1, 0.6), rng.uniform(0.03, 0.3)};
        const ModelParams p = to_model(s, k);
        const double lambda = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const double mu1 = rng.uniform(-0.5 / k, 1.5);
        const double mu2 = rng.uniform(-1.5, 1.5);
        CHECK(residual_i1(mu1, mu2, lambda, p) ==
              doctest::Approx(oracles::integral_condition_real(mu1, mu2, lambda, p)).epsilon(1e-8));
        CHECK(residual_i2(mu1, mu2, lambda, p) ==
              doctest::Approx(oracles::integral_condition_imag(mu1, mu2, lambda, p)).epsilon(1e-8));
        ++tested;
    }
}

TEST_CASE("case_oracle: sign-change semantics on hand-picked auxiliaries") {
    // alpha > 0, beta > 1: phi - psi flips sign on (0, 1).
    CHECK(case_oracle(DispersionAux{1.0, 1.1, 0.0}, 1.0));
    // 0 < beta < 1: no intersection regardless of alpha's sign.
    CHECK(!case_oracle(DispersionAux{1.0, 0.5, 0.0}, 1.0));
    CHECK(!case_oracle(DispersionAux{-1.0, 0.5, 0.0}, 1.0));
    CHECK_THROWS_AS(case_oracle(DispersionAux{1.0, 1.1, 0.0}, 0.0), std::invalid_argument);
}

TEST_CASE("instability: threshold test, root sign, and scan oracle agree") {
    oracles::TestRng rng(0x1234567u);
    int disagreements = 0;
    for (int i = 0; i < 300; ++i) {
        const double k = std::exp(rng.uniform(std::log(0.1), std::log(2.0)));
        const ScaledParams s{rng.uniform(0.3, 3.0), rng.uniform(0.1, 0.6), rng.uniform(0.03, 0.3)};
        const ModelParams p = to_model(s, k);
        const double lambda = std::exp(rng.uniform(std::log(0.05), std::log(50.0)));

        const bool via_threshold = is_unstable_mode(lambda, p);
        const bool via_root = growth_rate(lambda, p).unstable;
        const bool via_scan = case_oracle(dispersion_aux(lambda, 0.0, p), p.k * lambda);
        if (via_threshold != via_root || via_root != via_scan) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("unstable_band: endpoints, bounds, and stable-parameter absence") {
    const ModelParams a = table_set('A', 1.0);
    const auto band = unstable_band(a);
    REQUIRE(band.has_value());
    CHECK(band->lambda_lo > 0.0);
    CHECK(band->lambda_lo < band->lambda_hi);
    // Provable upper bound sqrt((F'[0]/k - 1)/d) from the beta > 1 necessity.
    CHECK(band->lambda_hi < std::sqrt((stiffness_ratio(a) - 1.0) / a.d));
    // The endpoints separate stable from unstable wavenumbers.
    CHECK(!is_unstable_mode(band->lambda_lo * 0.999, a));
    CHECK(is_unstable_mode(band->lambda_lo * 1.001, a));
    CHECK(is_unstable_mode(band->lambda_hi * 0.999, a));
    CHECK(!is_unstable_mode(band->lambda_hi * 1.001, a));

    const ModelParams b = table_set('B', 0.1);
    const auto band_b = unstable_band(b);
    REQUIRE(band_b.has_value());
    const double bound = std::sqrt((stiffness_ratio(b) - 1.0) / b.d); // sqrt(70)
    CHECK(bound == doctest::Approx(8.366600265340756).epsilon(1e-12));
    CHECK(band_b->lambda_hi < bound);
    for (double factor : {1.0, 10.0, 100.0})
        CHECK(!is_unstable_mode(bound * factor, b));

    CHECK(!unstable_band(table_set('D', 1.0)).has_value());
    CHECK(!unstable_band(table_set('B', 1.0)).has_value());
}

TEST_CASE("most_unstable_mode: interior maximum of the growth rate") {
    const ModelParams a = table_set('A', 1.0);
    const auto m = most_unstable_mode(a);
    REQUIRE(m.has_value());
    const auto band = unstable_band(a);
    REQUIRE(band.has_value());
    CHECK(m->lambda > band->lambda_lo);
    CHECK(m->lambda < band->lambda_hi);
    CHECK(m->mu1 > 0.0);
    const DispersionResult at_peak = growth_rate(m->lambda, a);
    REQUIRE(at_peak.mu1.has_value());
    CHECK(m->mu1 == doctest::Approx(*at_peak.mu1).epsilon(1e-10));
    for (double bump : {0.997, 1.003}) {
        const DispersionResult nb = growth_rate(m->lambda * bump, a);
        REQUIRE(nb.mu1.has_value());
        CHECK(*nb.mu1 <= m->mu1 + 1e-12);
    }

    CHECK(!most_unstable_mode(table_set('D', 1.0)).has_value());
}

} // TEST_SUITE
