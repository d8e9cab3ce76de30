#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "chemotax/field.hpp"
#include "oracles.hpp"

using namespace chemotax;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::vector<double> cosine_profile(const FieldGrid& g, int mode, double amplitude, double offset = 1.0) {
    std::vector<double> rho(g.sites);
    const double lam = kTwoPi * mode / g.length();
    for (int i = 0; i < g.sites; ++i) rho[i] = offset + amplitude * std::cos(lam * g.center(i));
    return rho;
}

// Discrete symbol of the screened second-difference operator at mode m:
// the cosine is an exact eigenvector with eigenvalue 1 + d(2 - 2cos(lam dx))/dx^2.
double symbol(const FieldGrid& g, double d, int mode) {
    const double lam = kTwoPi * mode / g.length();
    return 1.0 + d * (2.0 - 2.0 * std::cos(lam * g.dx)) / (g.dx * g.dx);
}

} // namespace

TEST_SUITE("field") {

TEST_CASE("grid validation") {
    CHECK_NOTHROW(validate(FieldGrid{4, 0.5}));
    CHECK_THROWS_AS(validate(FieldGrid{3, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(validate(FieldGrid{100, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(FieldGrid{100, -1.0}), std::invalid_argument);
}

TEST_CASE("cosine eigenfunctions are reproduced to machine precision") {
    const FieldGrid g{256, 0.05};
    for (double d : {0.1, 1.0, 7.0}) {
        const ChemoattractantSolver solver(g, d);
        for (int mode : {1, 3, 17, 100, 128}) {
            const auto rho = cosine_profile(g, mode, 0.4);
            const auto s = solver.solve(rho);
            const double sym = symbol(g, d, mode);
            double err = 0.0;
            for (int i = 0; i < g.sites; ++i) {
                const double expected = 1.0 + 0.4 * std::cos(kTwoPi * mode * g.center(i) / g.length()) / sym;
                err = std::max(err, std::fabs(s[i] - expected));
            }
            CAPTURE(d);
            CAPTURE(mode);
            CHECK(err < 1e-12);
        }
    }
}

TEST_CASE("mass identity on random inputs") {
    const FieldGrid g{500, 0.2};
    const ChemoattractantSolver solver(g, 2.5);
    oracles::TestRng rng(31);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> rho(g.sites);
        for (auto& r : rho) r = rng.uniform(0.0, 3.0);
        const auto s = solver.solve(rho);
        CHECK(mass_identity_check(s, rho) < 1e-10);
    }
}

TEST_CASE("defining balance holds at every site") {
    const FieldGrid g{300, 0.11};
    const ChemoattractantSolver solver(g, 0.9);
    oracles::TestRng rng(5);
    std::vector<double> rho(g.sites);
    for (auto& r : rho) r = rng.uniform(0.0, 2.0);
    const auto s = solver.solve(rho);
    CHECK(field_residual_inf(s, rho, g, 0.9) < 1e-12);
}

TEST_CASE("solver is linear") {
    const FieldGrid g{128, 0.05};
    const ChemoattractantSolver solver(g, 1.3);
    oracles::TestRng rng(11);
    std::vector<double> a(g.sites), b(g.sites), combo(g.sites);
    for (int i = 0; i < g.sites; ++i) {
        a[i] = rng.uniform(0.0, 2.0);
        b[i] = rng.uniform(0.0, 2.0);
        combo[i] = 2.0 * a[i] - 0.5 * b[i];
    }
    const auto sa = solver.solve(a);
    const auto sb = solver.solve(b);
    const auto sc = solver.solve(combo);
    for (int i = 0; i < g.sites; ++i)
        CHECK(sc[i] == doctest::Approx(2.0 * sa[i] - 0.5 * sb[i]).epsilon(1e-11));
}

TEST_CASE("translation equivariance on the periodic lattice") {
    const FieldGrid g{128, 0.05};
    const ChemoattractantSolver solver(g, 1.0);
    oracles::TestRng rng(13);
    std::vector<double> rho(g.sites);
    for (auto& r : rho) r = rng.uniform(0.5, 1.5);
    const auto s = solver.solve(rho);
    const int shift = 37;
    std::vector<double> shifted(g.sites);
    for (int i = 0; i < g.sites; ++i) shifted[(i + shift) % g.sites] = rho[i];
    const auto s_shifted = solver.solve(shifted);
    for (int i = 0; i < g.sites; ++i)
        CHECK(s_shifted[(i + shift) % g.sites] == doctest::Approx(s[i]).epsilon(1e-12));
}

TEST_CASE("d = 0 degenerates to the identity") {
    const FieldGrid g{64, 0.1};
    const ChemoattractantSolver solver(g, 0.0);
    oracles::TestRng rng(17);
    std::vector<double> rho(g.sites);
    for (auto& r : rho) r = rng.uniform(0.0, 5.0);
    const auto s = solver.solve(rho);
    for (int i = 0; i < g.sites; ++i) CHECK(s[i] == rho[i]);
}

TEST_CASE("uniform density gives uniform chemoattractant") {
    const FieldGrid g{64, 0.1};
    const ChemoattractantSolver solver(g, 3.0);
    std::vector<double> rho(g.sites, 1.0);
    const auto s = solver.solve(rho);
    for (double v : s) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("in-place solve aliases safely") {
    const FieldGrid g{64, 0.1};
    const ChemoattractantSolver solver(g, 1.0);
    oracles::TestRng rng(23);
    std::vector<double> rho(g.sites);
    for (auto& r : rho) r = rng.uniform(0.5, 1.5);
    const auto expected = solver.solve(rho);
    std::vector<double> in_place = rho;
    solver.solve(in_place, in_place);
    for (int i = 0; i < g.sites; ++i) CHECK(in_place[i] == expected[i]);
}

} // TEST_SUITE
