#pragma once

namespace chemotax {

// Parameters of the drift-diffusion (flux-limited Keller-Segel) limit in
// rescaled units: diffusivity d_hat and response slope at rest f_prime_hat.
struct ContinuumParams {
    double d_hat = 1.0;
    double f_prime_hat = 0.0;
};

// Throws std::invalid_argument unless d_hat > 0 and f_prime_hat >= 0.
void validate(const ContinuumParams& cp);

// Linear growth rate of wavenumber lambda_hat around the uniform state:
//   mu = -1 + f' lambda^2 / (3 (1 + d lambda^2)) - lambda^2 / 3.
double continuum_growth_rate(double lambda_hat, const ContinuumParams& cp);

// Instability threshold in f_prime_hat: (1 + sqrt(3 d_hat))^2.
double continuum_threshold(double d_hat);

// Wavenumber maximizing the growth rate: sqrt((sqrt(f') - 1)/d_hat).
// Throws std::domain_error when f_prime_hat < 1 (no interior maximum).
double most_unstable_mode(const ContinuumParams& cp);

} // namespace chemotax
