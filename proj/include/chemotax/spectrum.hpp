#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chemotax/snapshot.hpp"

namespace chemotax {

// Discrete power spectrum of the density fluctuation. Convention: for mode n
// with wavenumber lambda_n = 2 pi n / L, the coefficient is
//   rho_hat(lambda_n) = dx * sum_j (rho_j - mean) exp(-i lambda_n x_j)
// over site centers x_j, and power = |rho_hat|^2 / k_norm. Mode 0 is 0 by
// construction (mean removed). Modes run 0..sites/2.
struct SpectrumResult {
    std::vector<double> lambda;
    std::vector<double> power;
    // Averaging window; for a single-frame spectrum all three are 0.
    double window_start = 0.0;
    double window_end = 0.0;
    double window_interval = 0.0;
};

SpectrumResult power_spectrum(std::span<const double> rho, double dx, double k_norm);

// Mean spectrum over the frames nearest to t_start, t_start + interval, ...,
// up to t_end (each within half the frame spacing). Throws if no frame
// matches a requested time.
SpectrumResult time_averaged_spectrum(const SnapshotSeries& s, double t_start, double t_end, double interval,
                                      double k_norm);

// Largest local maximum below lambda_max. prominence = power / median power
// over the plateau band (upper half of modes). Absent when no local maximum
// reaches 2x the plateau median.
struct PeakInfo {
    double lambda = 0.0;
    int mode = 0;
    double power = 0.0;
    double prominence = 0.0;
};

std::optional<PeakInfo> detect_first_peak(const SpectrumResult& spec, double lambda_max);

// Median power over the plateau band (upper half of modes).
double plateau_median(const SpectrumResult& spec);

// Density extrema of one frame with the pattern classification:
// min > 0.5 "oscillatory", min < 0.2 "spike", otherwise "intermediate".
struct PatternMetrics {
    double min = 0.0;
    double max = 0.0;
    std::string classification;
};

PatternMetrics pattern_metrics(const Snapshot& frame);

// Long-table CSV (t, x, rho), rows sorted by (t, x).
void write_spacetime_csv(std::ostream& os, const SnapshotSeries& s);

} // namespace chemotax
