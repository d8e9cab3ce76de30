#include "chemotax/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace chemotax {

void validate(const ModelParams& p) {
    if (!(p.k > 0.0)) throw std::invalid_argument("ModelParams: k must be > 0, got " + std::to_string(p.k));
    if (!(p.d >= 0.0)) throw std::invalid_argument("ModelParams: d must be >= 0, got " + std::to_string(p.d));
    if (!(p.chi >= 0.0 && p.chi < 1.0))
        throw std::invalid_argument("ModelParams: chi must be in [0, 1), got " + std::to_string(p.chi));
    if (!(p.delta > 0.0)) throw std::invalid_argument("ModelParams: delta must be > 0, got " + std::to_string(p.delta));
}

ModelParams to_model(const ScaledParams& s, double k) {
    if (!(k > 0.0)) throw std::invalid_argument("to_model: k must be > 0");
    const double rk = std::sqrt(k);
    ModelParams p;
    p.k = k;
    p.d = s.d_over_k * k;
    p.chi = s.chi_over_sqrt_k * rk;
    p.delta = s.sqrt_k_delta / rk;
    validate(p);
    return p;
}

ScaledParams to_scaled(const ModelParams& p) {
    validate(p);
    const double rk = std::sqrt(p.k);
    return ScaledParams{p.d / p.k, p.chi / rk, rk * p.delta};
}

double response(double x, double chi, double delta) {
    return chi * std::tanh(x / delta);
}

double tumbling_kernel(double x, double chi, double delta) {
    return 1.0 - response(x, chi, delta);
}

} // namespace chemotax
