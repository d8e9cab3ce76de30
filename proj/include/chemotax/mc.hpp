#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chemotax/field.hpp"
#include "chemotax/model.hpp"
#include "chemotax/snapshot.hpp"

namespace chemotax {

// Particle state, struct-of-arrays. carried_log_s is the log-chemoattractant
// each particle sensed at the previous step (NaN until first sensed), used
// for the forward-difference material derivative.
struct ParticleEnsemble {
    std::vector<double> x;
    std::vector<double> vx, vy, vz;
    std::vector<double> carried_log_s;
    std::size_t size() const { return x.size(); }
};

struct McConfig {
    ModelParams params;
    FieldGrid grid{2000, 0.05}; // domain length is grid.length() = sites*dx exactly
    double dt = 5e-3;
    int particles_per_site = 500; // M: initial count per site; density = counts/M
    double t_end = 200.0;
    double snapshot_every = 1.0; // <= 0 keeps only the initial and final frames
    std::uint64_t seed = 1;
    int threads = 1;
    bool growth_enabled = true;
    bool tumbling_enabled = true; // test hook: false freezes all velocities
};

// Throws std::invalid_argument on violations; notably dt (1+chi)/k <= 1 so
// the tumble probability is a probability, and dt <= 1 for the growth step.
void validate(const McConfig& cfg);

// Exactly M particles per site: uniform position within the site, isotropic
// unit velocity, no sensing history.
ParticleEnsemble init_uniform(const McConfig& cfg);

// Per-site occupation counts; sum equals the particle count exactly.
std::vector<std::int64_t> count_sites(const ParticleEnsemble& e, const FieldGrid& g);

// Log chemoattractant at x from site values: centered-slope interpolation
//   log S(x) = log S[i] + (log S[i+1] - log S[i-1])/(2 dx) * (x - center_i).
// Throws std::domain_error unless every S[i] > 0.
double interpolate_log_chemoattractant(std::span<const double> s, double x, const FieldGrid& g);

// Forward-difference sensed derivative; 0 when there is no history (NaN).
double sensed_material_derivative(double carried, double current, double dt);

struct McDiagnostics {
    std::uint64_t tumbles = 0;
    std::uint64_t births = 0;
    std::uint64_t deaths = 0;
    double max_density = 0.0;
};

struct McRunResult {
    SnapshotSeries snapshots;
    std::uint64_t final_count = 0;
    McDiagnostics diagnostics;
};

// Step order per cycle: move, refresh density/field, tumble against the
// refreshed field, then divisions/deaths against the refreshed density.
// Given identical config (seed included) the snapshot stream is byte-identical
// for any thread count: every random decision is a counter-RNG function of
// (seed, step, particle index, purpose) and structural updates are applied in
// ascending index order.
class McEngine {
public:
    explicit McEngine(const McConfig& cfg);

    void step();
    McRunResult run();

    // Individual phases, exposed for contract tests. refresh_fields() must
    // follow any position change before step_tumble()/step_growth().
    void step_move();
    void refresh_fields();
    void step_tumble();
    void step_growth();

    const McConfig& config() const { return cfg_; }
    const ParticleEnsemble& ensemble() const { return ensemble_; }
    ParticleEnsemble& ensemble_mut() { return ensemble_; }
    const std::vector<std::int64_t>& site_counts() const { return counts_; }
    std::vector<double> density() const;
    const std::vector<double>& chemoattractant() const { return s_; }
    double time() const { return static_cast<double>(steps_done_) * cfg_.dt; }
    std::uint64_t step_index() const { return steps_done_; }
    const McDiagnostics& diagnostics() const { return diag_; }

private:
    McConfig cfg_;
    ChemoattractantSolver solver_;
    ParticleEnsemble ensemble_;
    std::vector<std::int64_t> counts_;
    std::vector<double> s_;      // chemoattractant at sites
    std::vector<double> log_s_;  // cached log of s_
    std::uint64_t steps_done_ = 0;
    std::uint64_t initial_count_ = 0;
    McDiagnostics diag_;
};

} // namespace chemotax
