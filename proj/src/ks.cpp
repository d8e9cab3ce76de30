#include "chemotax/ks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "chemotax/model.hpp"
#include "chemotax/rng.hpp"

namespace chemotax {

namespace {

// 16-point Gauss-Legendre nodes/weights on [0, 1].
constexpr int kGlOrder = 16;
constexpr double kGlNode[kGlOrder] = {
    0.005299532504175033702, 0.02771248846338371196, 0.06718439880608412806, 0.1222977958224984831,
    0.1910618777986781258,   0.2709916111713863068,  0.3591982246103705434,  0.4524937450811812799,
    0.5475062549188187201,   0.6408017753896294566,  0.7290083888286136932,  0.8089381222013218742,
    0.8777022041775015169,   0.9328156011939158719,  0.9722875115366162880,  0.9947004674958249663};
constexpr double kGlWeight[kGlOrder] = {
    0.01357622970587704743, 0.03112676196932394643, 0.04757925584124639240, 0.06231448562776693603,
    0.07479799440828836604, 0.08457825969750126909, 0.09130170752246179443, 0.09472530522753424814,
    0.09472530522753424814, 0.09130170752246179443, 0.08457825969750126909, 0.07479799440828836604,
    0.06231448562776693603, 0.04757925584124639240, 0.03112676196932394643, 0.01357622970587704743};

} // namespace

double flux_velocity(double grad_log_s, double chi, double delta_hat) {
    if (chi == 0.0) return 0.0;
    const double inv_delta = 1.0 / delta_hat;
    double acc = 0.0;
    for (int i = 0; i < kGlOrder; ++i) {
        const double v = kGlNode[i];
        acc += kGlWeight[i] * v * std::tanh(v * grad_log_s * inv_delta);
    }
    return chi * acc;
}

void validate(const KsConfig& cfg) {
    validate(cfg.grid);
    if (!(cfg.d_hat >= 0.0)) throw std::invalid_argument("KsConfig: d_hat must be >= 0");
    if (!(cfg.chi >= 0.0 && cfg.chi < 1.0)) throw std::invalid_argument("KsConfig: chi must be in [0, 1)");
    if (!(cfg.delta_hat > 0.0)) throw std::invalid_argument("KsConfig: delta_hat must be > 0");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("KsConfig: dt must be > 0");
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("KsConfig: t_end must be >= 0");
    if (!(cfg.diffusion > 0.0)) throw std::invalid_argument("KsConfig: diffusion must be > 0");
    if (!(cfg.init_amplitude >= 0.0)) throw std::invalid_argument("KsConfig: init_amplitude must be >= 0");
    if (cfg.init == KsConfig::Init::mode && (cfg.mode_number < 0 || cfg.mode_number > cfg.grid.sites / 2))
        throw std::invalid_argument("KsConfig: mode_number must be in [0, sites/2]");
    const double dx = cfg.grid.dx;
    double limit = 0.4 * dx * dx / cfg.diffusion;
    if (cfg.chi > 0.0) limit = std::min(limit, 0.4 * dx / (0.5 * cfg.chi));
    if (cfg.dt > limit)
        throw std::invalid_argument("KsConfig: dt = " + std::to_string(cfg.dt) +
                                    " violates the stability bound " + std::to_string(limit));
}

KsSolver::KsSolver(const KsConfig& cfg) : cfg_((validate(cfg), cfg)), solver_(cfg.grid, cfg.d_hat) {
    const int n = cfg_.grid.sites;
    rho_.resize(n);
    const double two_pi = 6.283185307179586476925286766559;
    if (cfg_.init == KsConfig::Init::mode) {
        const double lam = two_pi * cfg_.mode_number / cfg_.grid.length();
        for (int i = 0; i < n; ++i) rho_[i] = 1.0 + cfg_.init_amplitude * std::cos(lam * cfg_.grid.center(i));
    } else {
        const std::uint64_t key = rng::stream_key(cfg_.seed, 0);
        for (int i = 0; i < n; ++i)
            rho_[i] = 1.0 + cfg_.init_amplitude * (2.0 * rng::uniform01(key, static_cast<std::uint64_t>(i), 0) - 1.0);
    }
    s_.resize(n);
    log_s_.resize(n);
    face_flux_.resize(n);
}

void KsSolver::step() {
    const int n = cfg_.grid.sites;
    const double dx = cfg_.grid.dx;
    const double inv_dx = 1.0 / dx;
    const double dt = cfg_.dt;

    solver_.solve(rho_, s_);
    if (cfg_.chi > 0.0) {
        for (int i = 0; i < n; ++i) {
            if (!(s_[i] > 0.0)) throw std::runtime_error("KsSolver: non-positive chemoattractant");
            log_s_[i] = std::log(s_[i]);
        }
    }

    // face_flux_[i] sits between sites i and i+1 (periodic).
    for (int i = 0; i < n; ++i) {
        const int ip = (i == n - 1) ? 0 : i + 1;
        double flux = -cfg_.diffusion * (rho_[ip] - rho_[i]) * inv_dx;
        if (cfg_.chi > 0.0) {
            const double g = (log_s_[ip] - log_s_[i]) * inv_dx;
            const double u = flux_velocity(g, cfg_.chi, cfg_.delta_hat);
            max_abs_flux_ = std::max(max_abs_flux_, std::fabs(u));
            flux += u * (u >= 0.0 ? rho_[i] : rho_[ip]);
        }
        face_flux_[i] = flux;
    }
    double rho_max = 0.0;
    for (int i = 0; i < n; ++i) {
        const int im = (i == 0) ? n - 1 : i - 1;
        double next = rho_[i] - dt * (face_flux_[i] - face_flux_[im]) * inv_dx;
        if (cfg_.growth_enabled) next += dt * logistic_growth(rho_[i]) * rho_[i];
        if (next < 0.0) {
            next = 0.0;
            ++clamps_;
        }
        rho_[i] = next;
        if (!(next <= rho_max)) rho_max = next; // NaN-propagating maximum
    }
    ++steps_done_;
    if (!(rho_max <= 1e3)) // also catches NaN
        throw std::runtime_error("KsSolver: density blow-up, max rho = " + std::to_string(rho_max) + " at t = " +
                                 std::to_string(time()));
}

KsRunResult KsSolver::run() {
    KsRunResult out;
    out.snapshots.grid = cfg_.grid;
    out.snapshots.dt = cfg_.dt;
    out.snapshots.solver = "ks";

    auto emit = [&](double t) { out.snapshots.frames.push_back(Snapshot{t, rho_}); };
    emit(0.0);
    const auto total_steps = static_cast<std::uint64_t>(std::llround(cfg_.t_end / cfg_.dt));
    const double cadence = cfg_.snapshot_every;
    double next_snapshot = cadence > 0.0 ? cadence : std::numeric_limits<double>::infinity();
    for (std::uint64_t k = 0; k < total_steps; ++k) {
        step();
        const double t = time();
        if (t >= next_snapshot - 0.5 * cfg_.dt) {
            emit(t);
            next_snapshot += cadence;
        }
    }
    if (cadence <= 0.0 && total_steps > 0) emit(time());
    out.negative_clamps = clamps_;
    out.max_abs_flux = max_abs_flux_;
    return out;
}

} // namespace chemotax
