#pragma once

#include <cstdint>
#include <vector>

#include "chemotax/continuum.hpp"
#include "chemotax/field.hpp"
#include "chemotax/snapshot.hpp"

namespace chemotax {

// Bounded drift velocity from the log-chemoattractant gradient g:
//   U(g) = integral_0^1 v * chi * tanh(v g / delta_hat) dv,
// evaluated by a fixed 16-point Gauss-Legendre rule. Odd in g, |U| <= chi/2,
// and U -> (chi/(3 delta_hat)) g as g -> 0.
double flux_velocity(double grad_log_s, double chi, double delta_hat);

struct KsConfig {
    double d_hat = 1.0;     // chemoattractant diffusivity (rescaled)
    double chi = 0.5;       // response amplitude; flux magnitude is bounded by chi/2
    double delta_hat = 0.05; // response stiffness scale (rescaled)
    FieldGrid grid{2000, 0.05};
    double dt = 1e-3;
    double t_end = 100.0;
    double snapshot_every = 1.0; // <= 0 keeps only the initial and final frames
    bool growth_enabled = true;
    double diffusion = 1.0 / 3.0; // population diffusivity; verification hook may perturb it

    enum class Init { noise, mode };
    Init init = Init::noise;
    double init_amplitude = 1e-4;
    int mode_number = 1;  // for Init::mode: wavenumber 2 pi mode/L
    std::uint64_t seed = 1; // for Init::noise
};

// Throws std::invalid_argument on violations, including the explicit-step
// stability bound dt <= 0.4 * min(dx^2/diffusion, dx/(chi/2)).
void validate(const KsConfig& cfg);

inline ContinuumParams continuum_params(const KsConfig& cfg) {
    return ContinuumParams{cfg.d_hat, cfg.chi / cfg.delta_hat};
}

struct KsRunResult {
    SnapshotSeries snapshots;
    std::uint64_t negative_clamps = 0; // sites clamped to zero (reported, never silent)
    double max_abs_flux = 0.0;         // largest |U| seen at any face
};

// Finite-volume step: upwind advective flux with the bounded drift, centered
// diffusion, explicit Euler in time, logistic growth source. Conservative by
// construction (face fluxes telescope over the periodic lattice).
class KsSolver {
public:
    explicit KsSolver(const KsConfig& cfg);

    void step();
    KsRunResult run();

    const KsConfig& config() const { return cfg_; }
    const std::vector<double>& rho() const { return rho_; }
    std::vector<double>& rho_mut() { return rho_; }
    const std::vector<double>& chemoattractant() const { return s_; }
    double time() const { return static_cast<double>(steps_done_) * cfg_.dt; }
    std::uint64_t negative_clamps() const { return clamps_; }
    double max_abs_flux() const { return max_abs_flux_; }

private:
    KsConfig cfg_;
    ChemoattractantSolver solver_;
    std::vector<double> rho_, s_, log_s_, face_flux_;
    std::uint64_t steps_done_ = 0;
    std::uint64_t clamps_ = 0;
    double max_abs_flux_ = 0.0;
};

} // namespace chemotax
