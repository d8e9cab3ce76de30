#pragma once

#include <optional>

#include "chemotax/model.hpp"

namespace chemotax {

// Auxiliaries of the linearized kinetic eigenproblem at wavenumber lambda and
// real growth rate mu1:
//   alpha = (1-k)/(k lambda),  beta = F'[0]/(k(1+d lambda^2)),
//   xi    = k lambda / (1 + k mu1)   (requires 1 + k mu1 > 0).
struct DispersionAux {
    double alpha;
    double beta;
    double xi;
};

DispersionAux dispersion_aux(double lambda, double mu1, const ModelParams& p);

// phi(xi) = arctan(xi)/xi, continued by 1 at 0; strictly decreasing on [0, inf).
// Uses the Taylor expansion 1 - xi^2/3 + xi^4/5 below |xi| = 1e-4.
double phi(double xi);

// psi(xi) = (1 - beta)/(alpha xi - beta). Throws std::domain_error at the
// pole alpha xi - beta == 0.
double psi(double xi, double alpha, double beta);

// Stability boundary in the stiffness ratio F'[0]/k at wavenumber lambda:
// the mode is unstable iff F'[0]/k exceeds
//   [1 + k/(k lambda / arctan(k lambda) - 1)] * (1 + d lambda^2).
// The denominator k*lambda/arctan(k*lambda) - 1 switches to its expansion
// (k lambda)^2/3 * (1 - 4 (k lambda)^2 / 15) below k*lambda = 1e-4.
double instability_rhs(double lambda, double k, double d);

bool is_unstable_mode(double lambda, const ModelParams& p);

// Infimum of instability_rhs over lambda in [1e-3, 1e3]: coarse log-spaced
// scan (>= 2000 points) then golden-section refinement to 1e-10 relative.
struct CriticalCurvePoint {
    double k;
    double d;
    double lambda_argmin;
    double critical_stiffness;
};

CriticalCurvePoint critical_stiffness(double k, double d);

// Real-branch dispersion solve at wavenumber lambda: finds roots xi > 0 of
//   (alpha xi - beta) arctan(xi)/xi = 1 - beta        (mu2 = 0 branch)
// and reports the smallest-xi root, which maximizes mu1 = lambda/xi - 1/k.
// No root: mu1/xi absent, unstable=false. beta == 1 short-circuits to
// mu1 = -1 (the root equation degenerates there).
struct DispersionResult {
    double lambda = 0.0;
    std::optional<double> xi;
    std::optional<double> mu1;
    double mu2 = 0.0;
    bool unstable = false;
};

DispersionResult growth_rate(double lambda, const ModelParams& p);

// LHS minus RHS of the two closed-form eigenvalue conditions for a general
// complex rate mu1 + i*lambda*mu2 (both vanish at true eigenvalues):
//   I1: (alpha - beta/xi) [atan(xi(mu2+1)) - atan(xi(mu2-1))]
//        + (mu2 beta / 2) log[(xi^-2+(mu2-1)^2)/(xi^-2+(mu2+1)^2)] - (2 - 2 beta)
//   I2: mu2 beta [atan(xi(mu2+1)) - atan(xi(mu2-1))]
//        + (1/2)(alpha - beta/xi) log[1 + 4 mu2/(xi^-2+(mu2-1)^2)]
// I1 is even and I2 is odd in mu2, so mu2 = 0 satisfies I2 identically.
// Throws std::domain_error when 1 + k mu1 <= 0.
double residual_i1(double mu1, double mu2, double lambda, const ModelParams& p);
double residual_i2(double mu1, double mu2, double lambda, const ModelParams& p);

// Ground-truth oracle for the unstable-mode question: dense pole-aware scan
// (grid_points >= 1e5) for a sign change of phi - psi on (0, k_lambda).
// Independent of growth_rate's root search and of instability_rhs.
bool case_oracle(const DispersionAux& aux, double k_lambda, int grid_points = 200000);

// Endpoints of the unstable wavenumber interval {lambda : is_unstable_mode},
// bracketed around the argmin of instability_rhs and bisected to 1e-10
// relative. Absent when the parameters are stable at every wavenumber.
// Requires d > 0 (the band is unbounded above at d = 0).
struct UnstableBand {
    double lambda_lo;
    double lambda_hi;
};

std::optional<UnstableBand> unstable_band(const ModelParams& p);

// Wavenumber maximizing the real growth rate mu1 over the unstable band
// (golden-section on growth_rate), with the rate attained there. Absent for
// stable parameters.
struct MostUnstableMode {
    double lambda;
    double mu1;
};

std::optional<MostUnstableMode> most_unstable_mode(const ModelParams& p);

} // namespace chemotax
