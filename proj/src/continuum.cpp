#include "chemotax/continuum.hpp"

#include <cmath>
#include <stdexcept>

namespace chemotax {

void validate(const ContinuumParams& cp) {
    if (!(cp.d_hat > 0.0)) throw std::invalid_argument("ContinuumParams: d_hat must be > 0");
    if (!(cp.f_prime_hat >= 0.0)) throw std::invalid_argument("ContinuumParams: f_prime_hat must be >= 0");
}

double continuum_growth_rate(double lambda_hat, const ContinuumParams& cp) {
    validate(cp);
    const double l2 = lambda_hat * lambda_hat;
    return -1.0 + cp.f_prime_hat * l2 / (3.0 * (1.0 + cp.d_hat * l2)) - l2 / 3.0;
}

double continuum_threshold(double d_hat) {
    if (!(d_hat > 0.0)) throw std::invalid_argument("continuum_threshold: d_hat must be > 0");
    const double s = 1.0 + std::sqrt(3.0 * d_hat);
    return s * s;
}

double most_unstable_mode(const ContinuumParams& cp) {
    validate(cp);
    if (cp.f_prime_hat < 1.0)
        throw std::domain_error("most_unstable_mode: f_prime_hat < 1 has no interior growth maximum");
    return std::sqrt((std::sqrt(cp.f_prime_hat) - 1.0) / cp.d_hat);
}

} // namespace chemotax
