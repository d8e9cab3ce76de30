#include "chemotax/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace chemotax {

SpectrumResult power_spectrum(std::span<const double> rho, double dx, double k_norm) {
    const int n = static_cast<int>(rho.size());
    if (n < 8) throw std::invalid_argument("power_spectrum: need at least 8 sites");
    if (!(dx > 0.0)) throw std::invalid_argument("power_spectrum: dx must be > 0");
    if (!(k_norm > 0.0)) throw std::invalid_argument("power_spectrum: k_norm must be > 0");

    const double length = n * dx;
    double mean = 0.0;
    for (double v : rho) mean += v;
    mean /= n;

    const int modes = n / 2;
    SpectrumResult out;
    out.lambda.resize(modes + 1);
    out.power.resize(modes + 1);
    out.lambda[0] = 0.0;
    out.power[0] = 0.0;
    const double two_pi = 6.283185307179586476925286766559;
    for (int m = 1; m <= modes; ++m) {
        const double lam = two_pi * m / length;
        double re = 0.0, im = 0.0;
        for (int j = 0; j < n; ++j) {
            const double phase = lam * (j + 0.5) * dx;
            const double f = rho[j] - mean;
            re += f * std::cos(phase);
            im -= f * std::sin(phase);
        }
        out.lambda[m] = lam;
        out.power[m] = (dx * dx) * (re * re + im * im) / k_norm;
    }
    return out;
}

SpectrumResult time_averaged_spectrum(const SnapshotSeries& s, double t_start, double t_end, double interval,
                                      double k_norm) {
    if (s.frames.empty()) throw std::invalid_argument("time_averaged_spectrum: no frames");
    if (!(interval > 0.0)) throw std::invalid_argument("time_averaged_spectrum: interval must be > 0");
    if (!(t_end >= t_start)) throw std::invalid_argument("time_averaged_spectrum: t_end < t_start");

    // Frame spacing bounds how far a requested time may sit from its frame.
    double spacing = interval;
    for (std::size_t i = 1; i < s.frames.size(); ++i)
        spacing = std::min(spacing, s.frames[i].t - s.frames[i - 1].t);
    const double slack = 0.5 * spacing + 1e-9;

    SpectrumResult acc;
    int count = 0;
    for (double t = t_start; t <= t_end + 1e-9; t += interval) {
        const Snapshot* best = nullptr;
        double best_err = slack;
        for (const auto& f : s.frames) {
            const double err = std::fabs(f.t - t);
            if (err < best_err) {
                best_err = err;
                best = &f;
            }
        }
        if (!best)
            throw std::invalid_argument("time_averaged_spectrum: no frame near t = " + std::to_string(t));
        SpectrumResult one = power_spectrum(best->rho, s.grid.dx, k_norm);
        if (count == 0) {
            acc = std::move(one);
        } else {
            for (std::size_t i = 0; i < acc.power.size(); ++i) acc.power[i] += one.power[i];
        }
        ++count;
    }
    for (double& p : acc.power) p /= count;
    acc.window_start = t_start;
    acc.window_end = t_end;
    acc.window_interval = interval;
    return acc;
}

double plateau_median(const SpectrumResult& spec) {
    const std::size_t n = spec.power.size();
    if (n < 4) throw std::invalid_argument("plateau_median: spectrum too short");
    std::vector<double> band(spec.power.begin() + n / 2, spec.power.end());
    std::sort(band.begin(), band.end());
    const std::size_t m = band.size();
    return (m % 2 == 1) ? band[m / 2] : 0.5 * (band[m / 2 - 1] + band[m / 2]);
}

std::optional<PeakInfo> detect_first_peak(const SpectrumResult& spec, double lambda_max) {
    const int n = static_cast<int>(spec.power.size());
    if (n < 4) throw std::invalid_argument("detect_first_peak: spectrum too short");
    const double med = plateau_median(spec);

    int best = -1;
    for (int i = 1; i + 1 < n; ++i) {
        if (spec.lambda[i] >= lambda_max) break;
        if (spec.power[i] > spec.power[i - 1] && spec.power[i] > spec.power[i + 1]) {
            if (best < 0 || spec.power[i] > spec.power[best]) best = i;
        }
    }
    if (best < 0 || !(spec.power[best] >= 2.0 * med)) return std::nullopt;
    PeakInfo p;
    p.lambda = spec.lambda[best];
    p.mode = best;
    p.power = spec.power[best];
    p.prominence = (med > 0.0) ? spec.power[best] / med : std::numeric_limits<double>::infinity();
    return p;
}

PatternMetrics pattern_metrics(const Snapshot& frame) {
    if (frame.rho.empty()) throw std::invalid_argument("pattern_metrics: empty frame");
    PatternMetrics m;
    m.min = *std::min_element(frame.rho.begin(), frame.rho.end());
    m.max = *std::max_element(frame.rho.begin(), frame.rho.end());
    if (m.min > 0.5)
        m.classification = "oscillatory";
    else if (m.min < 0.2)
        m.classification = "spike";
    else
        m.classification = "intermediate";
    return m;
}

void write_spacetime_csv(std::ostream& os, const SnapshotSeries& s) {
    const auto flags = os.flags();
    os.precision(17);
    for (const auto& [k, v] : s.meta) os << "# " << k << " = " << v << "\n";
    os << "# columns: t,x,rho\n";
    // Frames are stored in time order and sites in x order, so emission
    // order is already sorted by (t, x).
    for (const auto& f : s.frames)
        for (int i = 0; i < s.grid.sites; ++i) os << f.t << ',' << s.grid.center(i) << ',' << f.rho[i] << "\n";
    os.flags(flags);
}

} // namespace chemotax
