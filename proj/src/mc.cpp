#include "chemotax/mc.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "chemotax/rng.hpp"

namespace chemotax {

namespace {

// RNG purposes. Stream 0 is initialization; step n draws from stream n+1.
enum Purpose : std::uint64_t {
    kInitPos = 0,
    kInitU1 = 1,
    kInitU2 = 2,
    kTumble = 0,
    kVelU1 = 1,
    kVelU2 = 2,
    kGrowth = 3,
    kBirthPos = 4,
};

inline int site_of(double x, double inv_dx, int sites) {
    int i = static_cast<int>(x * inv_dx);
    return i >= sites ? sites - 1 : i;
}

inline double wrap(double x, double length) {
    if (x >= length) x -= length;
    if (x < 0.0) x += length;
    if (x >= length) x = 0.0; // x + length can round up to length itself
    return x;
}

// Runs fn(block, begin, end) over contiguous index blocks covering [0, n).
// Results must not depend on the partition; threading is purely throughput.
template <class Fn>
void parallel_blocks(std::size_t n, int threads, Fn&& fn) {
    if (threads <= 1 || n < 4096) {
        fn(0, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(threads);
    for (int b = 0; b < threads; ++b) {
        const std::size_t lo = n * b / threads;
        const std::size_t hi = n * (b + 1) / threads;
        workers.emplace_back([&fn, b, lo, hi] { fn(b, lo, hi); });
    }
    for (auto& w : workers) w.join();
}

struct Newborn {
    double x, vx, vy, vz, carried;
};

} // namespace

void validate(const McConfig& cfg) {
    validate(cfg.params);
    validate(cfg.grid);
    if (!(cfg.dt > 0.0 && cfg.dt <= 1.0)) throw std::invalid_argument("McConfig: dt must be in (0, 1]");
    if (cfg.dt * (1.0 + cfg.params.chi) / cfg.params.k > 1.0)
        throw std::invalid_argument("McConfig: dt (1+chi)/k exceeds 1; tumble probability would leave [0, 1]");
    if (cfg.particles_per_site < 1) throw std::invalid_argument("McConfig: particles_per_site must be >= 1");
    if (!(cfg.t_end >= 0.0)) throw std::invalid_argument("McConfig: t_end must be >= 0");
    if (cfg.threads < 1) throw std::invalid_argument("McConfig: threads must be >= 1");
}

ParticleEnsemble init_uniform(const McConfig& cfg) {
    validate(cfg);
    const std::size_t n = static_cast<std::size_t>(cfg.grid.sites) * cfg.particles_per_site;
    ParticleEnsemble e;
    e.x.resize(n);
    e.vx.resize(n);
    e.vy.resize(n);
    e.vz.resize(n);
    e.carried_log_s.assign(n, std::numeric_limits<double>::quiet_NaN());
    const std::uint64_t key = rng::stream_key(cfg.seed, 0);
    parallel_blocks(n, cfg.threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const std::size_t site = i / cfg.particles_per_site;
            e.x[i] = wrap((site + rng::uniform01(key, i, kInitPos)) * cfg.grid.dx, cfg.grid.length());
            const Vec3 v = sample_velocity(rng::uniform01(key, i, kInitU1), rng::uniform01(key, i, kInitU2));
            e.vx[i] = v.x;
            e.vy[i] = v.y;
            e.vz[i] = v.z;
        }
    });
    return e;
}

std::vector<std::int64_t> count_sites(const ParticleEnsemble& e, const FieldGrid& g) {
    validate(g);
    std::vector<std::int64_t> counts(g.sites, 0);
    const double inv_dx = 1.0 / g.dx;
    for (double x : e.x) ++counts[site_of(x, inv_dx, g.sites)];
    return counts;
}

namespace {

inline double interp_from_logs(std::span<const double> log_s, double x, const FieldGrid& g) {
    const int i = site_of(x, 1.0 / g.dx, g.sites);
    const int im = (i == 0) ? g.sites - 1 : i - 1;
    const int ip = (i == g.sites - 1) ? 0 : i + 1;
    const double slope = (log_s[ip] - log_s[im]) / (2.0 * g.dx);
    return log_s[i] + slope * (x - g.center(i));
}

} // namespace

double interpolate_log_chemoattractant(std::span<const double> s, double x, const FieldGrid& g) {
    validate(g);
    if (static_cast<int>(s.size()) != g.sites)
        throw std::invalid_argument("interpolate_log_chemoattractant: size mismatch");
    if (!(x >= 0.0 && x < g.length()))
        throw std::invalid_argument("interpolate_log_chemoattractant: x outside [0, L)");
    const int i = site_of(x, 1.0 / g.dx, g.sites);
    const int im = (i == 0) ? g.sites - 1 : i - 1;
    const int ip = (i == g.sites - 1) ? 0 : i + 1;
    for (int j : {im, i, ip})
        if (!(s[j] > 0.0)) throw std::domain_error("interpolate_log_chemoattractant: S must be positive");
    const double logs[3] = {std::log(s[im]), std::log(s[i]), std::log(s[ip])};
    const double slope = (logs[2] - logs[0]) / (2.0 * g.dx);
    return logs[1] + slope * (x - g.center(i));
}

double sensed_material_derivative(double carried, double current, double dt) {
    if (std::isnan(carried)) return 0.0;
    return (current - carried) / dt;
}

McEngine::McEngine(const McConfig& cfg)
    : cfg_(cfg), solver_((validate(cfg), cfg.grid), cfg.params.d), ensemble_(init_uniform(cfg)) {
    initial_count_ = ensemble_.size();
    refresh_fields();
}

std::vector<double> McEngine::density() const {
    std::vector<double> rho(counts_.size());
    const double inv_m = 1.0 / cfg_.particles_per_site;
    for (std::size_t i = 0; i < counts_.size(); ++i) rho[i] = static_cast<double>(counts_[i]) * inv_m;
    return rho;
}

void McEngine::step_move() {
    const double dt = cfg_.dt;
    const double length = cfg_.grid.length();
    auto& x = ensemble_.x;
    const auto& vx = ensemble_.vx;
    parallel_blocks(ensemble_.size(), cfg_.threads, [&](int, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) x[i] = wrap(x[i] + vx[i] * dt, length);
    });
}

void McEngine::refresh_fields() {
    if (ensemble_.size() == 0) throw std::runtime_error("McEngine: ensemble died out");
    const int sites = cfg_.grid.sites;
    const double inv_dx = 1.0 / cfg_.grid.dx;
    const int threads = (cfg_.threads > 1 && ensemble_.size() >= 4096) ? cfg_.threads : 1;
    counts_.assign(sites, 0);
    if (threads == 1) {
        for (double x : ensemble_.x) ++counts_[site_of(x, inv_dx, sites)];
    } else {
        std::vector<std::vector<std::int64_t>> local(threads);
        parallel_blocks(ensemble_.size(), threads, [&](int b, std::size_t lo, std::size_t hi) {
            auto& mine = local[b];
            mine.assign(sites, 0);
            const auto& x = ensemble_.x;
            for (std::size_t i = lo; i < hi; ++i) ++mine[site_of(x[i], inv_dx, sites)];
        });
        for (const auto& mine : local)
            for (int i = 0; i < sites; ++i) counts_[i] += mine[i];
    }

    const double inv_m = 1.0 / cfg_.particles_per_site;
    std::vector<double> rho(sites);
    for (int i = 0; i < sites; ++i) {
        rho[i] = static_cast<double>(counts_[i]) * inv_m;
        diag_.max_density = std::max(diag_.max_density, rho[i]);
    }
    s_.resize(sites);
    solver_.solve(rho, s_);
    if (cfg_.params.chi > 0.0) {
        log_s_.resize(sites);
        for (int i = 0; i < sites; ++i) {
            if (!(s_[i] > 0.0)) throw std::runtime_error("McEngine: non-positive chemoattractant");
            log_s_[i] = std::log(s_[i]);
        }
    }
}

void McEngine::step_tumble() {
    if (!cfg_.tumbling_enabled) return;
    const double q = cfg_.dt / cfg_.params.k;
    const double chi = cfg_.params.chi;
    const std::uint64_t key = rng::stream_key(cfg_.seed, steps_done_ + 1);
    std::vector<std::uint64_t> tumbles_per_block(std::max(1, cfg_.threads), 0);

    if (chi == 0.0) {
        // Kernel is identically 1: constant probability, no sensing needed.
        parallel_blocks(ensemble_.size(), cfg_.threads, [&](int b, std::size_t lo, std::size_t hi) {
            std::uint64_t local = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                if (rng::uniform01(key, i, kTumble) < q) {
                    const Vec3 v = sample_velocity(rng::uniform01(key, i, kVelU1), rng::uniform01(key, i, kVelU2));
                    ensemble_.vx[i] = v.x;
                    ensemble_.vy[i] = v.y;
                    ensemble_.vz[i] = v.z;
                    ++local;
                }
            }
            tumbles_per_block[b] += local;
        });
    } else {
        const double inv_dt = 1.0 / cfg_.dt;
        const double inv_delta = 1.0 / cfg_.params.delta;
        // Saturation window: u >= p_hi can never tumble and u < p_lo always
        // does, whatever the sensed signal; tanh is needed only in between.
        const double p_lo = q * (1.0 - chi);
        const double p_hi = q * (1.0 + chi);
        const FieldGrid grid = cfg_.grid;
        parallel_blocks(ensemble_.size(), cfg_.threads, [&](int b, std::size_t lo, std::size_t hi) {
            std::uint64_t local = 0;
            for (std::size_t i = lo; i < hi; ++i) {
                const double cur = interp_from_logs(log_s_, ensemble_.x[i], grid);
                const double carried = ensemble_.carried_log_s[i];
                ensemble_.carried_log_s[i] = cur;
                const double u = rng::uniform01(key, i, kTumble);
                bool tumbles;
                if (u >= p_hi) {
                    tumbles = false;
                } else if (u < p_lo) {
                    tumbles = true;
                } else {
                    const double sensed = std::isnan(carried) ? 0.0 : (cur - carried) * inv_dt;
                    tumbles = u < q * (1.0 - chi * std::tanh(sensed * inv_delta));
                }
                if (tumbles) {
                    const Vec3 v = sample_velocity(rng::uniform01(key, i, kVelU1), rng::uniform01(key, i, kVelU2));
                    ensemble_.vx[i] = v.x;
                    ensemble_.vy[i] = v.y;
                    ensemble_.vz[i] = v.z;
                    ++local;
                }
            }
            tumbles_per_block[b] += local;
        });
    }
    for (std::uint64_t t : tumbles_per_block) diag_.tumbles += t;
}

void McEngine::step_growth() {
    if (!cfg_.growth_enabled) return;
    const int sites = cfg_.grid.sites;
    const double dt = cfg_.dt;
    const double inv_dx = 1.0 / cfg_.grid.dx;
    const double inv_m = 1.0 / cfg_.particles_per_site;

    // Per-site signed event probability: positive divides, negative dies.
    std::vector<double> prob(sites);
    for (int i = 0; i < sites; ++i) {
        const double p = logistic_growth(static_cast<double>(counts_[i]) * inv_m) * dt;
        if (std::fabs(p) > 1.0)
            throw std::runtime_error("McEngine: growth probability |P| dt > 1 at site " + std::to_string(i));
        prob[i] = p;
    }

    const std::uint64_t key = rng::stream_key(cfg_.seed, steps_done_ + 1);
    const int blocks = std::max(1, cfg_.threads);
    std::vector<std::vector<Newborn>> births(blocks);
    std::vector<std::vector<std::size_t>> deaths(blocks);

    parallel_blocks(ensemble_.size(), cfg_.threads, [&](int b, std::size_t lo, std::size_t hi) {
        auto& my_births = births[b];
        auto& my_deaths = deaths[b];
        for (std::size_t i = lo; i < hi; ++i) {
            const int site = site_of(ensemble_.x[i], inv_dx, sites);
            const double p = prob[site];
            if (p == 0.0) continue;
            const double u = rng::uniform01(key, i, kGrowth);
            if (p > 0.0) {
                if (u < p) {
                    // (site + u) dx can round up onto the next cell boundary;
                    // at the last site that is L itself, so wrap.
                    const double xb =
                        wrap((site + rng::uniform01(key, i, kBirthPos)) * cfg_.grid.dx, cfg_.grid.length());
                    my_births.push_back(Newborn{xb, ensemble_.vx[i], ensemble_.vy[i], ensemble_.vz[i],
                                                ensemble_.carried_log_s[i]});
                }
            } else if (u < -p) {
                my_deaths.push_back(i);
            }
        }
    });

    // Deaths first, largest index first: the element swapped in from the back
    // is never itself pending (all larger indices are already handled).
    for (int b = blocks - 1; b >= 0; --b) {
        for (auto it = deaths[b].rbegin(); it != deaths[b].rend(); ++it) {
            const std::size_t i = *it;
            const std::size_t last = ensemble_.size() - 1;
            ensemble_.x[i] = ensemble_.x[last];
            ensemble_.vx[i] = ensemble_.vx[last];
            ensemble_.vy[i] = ensemble_.vy[last];
            ensemble_.vz[i] = ensemble_.vz[last];
            ensemble_.carried_log_s[i] = ensemble_.carried_log_s[last];
            ensemble_.x.pop_back();
            ensemble_.vx.pop_back();
            ensemble_.vy.pop_back();
            ensemble_.vz.pop_back();
            ensemble_.carried_log_s.pop_back();
            ++diag_.deaths;
        }
    }
    for (const auto& block : births) {
        for (const Newborn& nb : block) {
            ensemble_.x.push_back(nb.x);
            ensemble_.vx.push_back(nb.vx);
            ensemble_.vy.push_back(nb.vy);
            ensemble_.vz.push_back(nb.vz);
            ensemble_.carried_log_s.push_back(nb.carried);
            ++diag_.births;
        }
    }

    if (ensemble_.size() > 10 * initial_count_)
        throw std::runtime_error("McEngine: particle count exceeded 10x the initial population (" +
                                 std::to_string(ensemble_.size()) + " of " + std::to_string(initial_count_) + ")");
    if (ensemble_.size() == 0) throw std::runtime_error("McEngine: ensemble died out");
}

void McEngine::step() {
    step_move();
    refresh_fields();
    step_tumble();
    step_growth();
    ++steps_done_;
}

McRunResult McEngine::run() {
    McRunResult out;
    out.snapshots.grid = cfg_.grid;
    out.snapshots.dt = cfg_.dt;
    out.snapshots.solver = "mc";

    const double inv_m = 1.0 / cfg_.particles_per_site;
    auto emit = [&](double t) {
        const auto counts = count_sites(ensemble_, cfg_.grid);
        Snapshot f;
        f.t = t;
        f.rho.resize(counts.size());
        for (std::size_t i = 0; i < counts.size(); ++i) f.rho[i] = static_cast<double>(counts[i]) * inv_m;
        out.snapshots.frames.push_back(std::move(f));
    };

    emit(0.0);
    const auto total_steps = static_cast<std::uint64_t>(std::llround(cfg_.t_end / cfg_.dt));
    const double cadence = cfg_.snapshot_every;
    double next_snapshot = cadence > 0.0 ? cadence : std::numeric_limits<double>::infinity();
    for (std::uint64_t n = 0; n < total_steps; ++n) {
        step();
        const double t = time();
        if (t >= next_snapshot - 0.5 * cfg_.dt) {
            emit(t);
            next_snapshot += cadence;
        }
    }
    if (cadence <= 0.0 && total_steps > 0) emit(time());
    out.final_count = ensemble_.size();
    out.diagnostics = diag_;
    return out;
}

} // namespace chemotax
