#pragma once

namespace chemotax {

// Parameters of the run-and-tumble chemotaxis model in kinetic units.
// k: mean run duration, d: chemoattractant diffusivity, chi/delta: response
// amplitude and stiffness scale of the tanh response.
struct ModelParams {
    double k = 1.0;
    double d = 1.0;
    double chi = 0.5;
    double delta = 0.1;
};

// Throws std::invalid_argument unless k > 0, d >= 0, 0 <= chi < 1, delta > 0.
void validate(const ModelParams& p);

// Parameter-table triple (d/k, chi/sqrt(k), sqrt(k)*delta). Together with k it
// fixes ModelParams; the stiffness ratio (chi/sqrt k)/(sqrt k * delta) is
// k-independent under this parametrization.
struct ScaledParams {
    double d_over_k;
    double chi_over_sqrt_k;
    double sqrt_k_delta;
};

ModelParams to_model(const ScaledParams& s, double k);
ScaledParams to_scaled(const ModelParams& p);

// Smooth saturating response of tumbling to the sensed signal:
// F[X] = chi * tanh(X / delta). Odd, strictly increasing, |F| < chi.
double response(double x, double chi, double delta);
inline double response(double x, const ModelParams& p) { return response(x, p.chi, p.delta); }

// Response slope at rest, F'[0] = chi / delta.
inline double response_slope(const ModelParams& p) { return p.chi / p.delta; }

// Tumbling kernel K[X] = 1 - F[X], bounded in (1 - chi, 1 + chi).
double tumbling_kernel(double x, double chi, double delta);
inline double tumbling_kernel(double x, const ModelParams& p) { return tumbling_kernel(x, p.chi, p.delta); }

// Logistic growth rate P[rho] = 1 - rho.
inline double logistic_growth(double rho) { return 1.0 - rho; }

// F'[0]/k, the quantity the instability thresholds are written in.
inline double stiffness_ratio(const ModelParams& p) { return p.chi / (p.delta * p.k); }

} // namespace chemotax
