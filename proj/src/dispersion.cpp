#include "chemotax/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace chemotax {

namespace {

constexpr double kSeriesThreshold = 1e-4;

double log_spaced(double lo, double hi, int i, int n) {
    return lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
}

// Golden-section minimization in log space over [a, b], to rel_tol on the argument.
template <class F>
double golden_min(F f, double a, double b, double rel_tol) {
    const double gr = 0.6180339887498948482;
    double la = std::log(a), lb = std::log(b);
    double c = lb - gr * (lb - la);
    double d = la + gr * (lb - la);
    double fc = f(std::exp(c)), fd = f(std::exp(d));
    while (lb - la > rel_tol) {
        if (fc < fd) {
            lb = d;
            d = c;
            fd = fc;
            c = lb - gr * (lb - la);
            fc = f(std::exp(c));
        } else {
            la = c;
            c = d;
            fc = fd;
            d = la + gr * (lb - la);
            fd = f(std::exp(d));
        }
    }
    return std::exp(0.5 * (la + lb));
}

} // namespace

DispersionAux dispersion_aux(double lambda, double mu1, const ModelParams& p) {
    validate(p);
    if (!(lambda > 0.0)) throw std::invalid_argument("dispersion_aux: lambda must be > 0");
    const double denom = 1.0 + p.k * mu1;
    if (!(denom > 0.0)) throw std::domain_error("dispersion_aux: 1 + k*mu1 must be > 0");
    DispersionAux a;
    a.alpha = (1.0 - p.k) / (p.k * lambda);
    a.beta = response_slope(p) / (p.k * (1.0 + p.d * lambda * lambda));
    a.xi = p.k * lambda / denom;
    return a;
}

double phi(double xi) {
    if (xi < 0.0) throw std::invalid_argument("phi: xi must be >= 0");
    if (xi < kSeriesThreshold) {
        const double x2 = xi * xi;
        return 1.0 - x2 / 3.0 + x2 * x2 / 5.0;
    }
    return std::atan(xi) / xi;
}

double psi(double xi, double alpha, double beta) {
    const double denom = alpha * xi - beta;
    if (denom == 0.0) throw std::domain_error("psi: pole at alpha*xi == beta");
    return (1.0 - beta) / denom;
}

double instability_rhs(double lambda, double k, double d) {
    if (!(lambda > 0.0)) throw std::invalid_argument("instability_rhs: lambda must be > 0");
    if (!(k > 0.0)) throw std::invalid_argument("instability_rhs: k must be > 0");
    if (!(d >= 0.0)) throw std::invalid_argument("instability_rhs: d must be >= 0");
    const double u = k * lambda;
    // u/atan(u) - 1 loses all digits to cancellation as u -> 0; switch to its
    // expansion u^2/3 (1 - 4 u^2/15) there.
    double denom;
    if (u < kSeriesThreshold) {
        denom = u * u / 3.0 * (1.0 - 4.0 * u * u / 15.0);
    } else {
        denom = u / std::atan(u) - 1.0;
    }
    return (1.0 + k / denom) * (1.0 + d * lambda * lambda);
}

bool is_unstable_mode(double lambda, const ModelParams& p) {
    validate(p);
    return stiffness_ratio(p) > instability_rhs(lambda, p.k, p.d);
}

CriticalCurvePoint critical_stiffness(double k, double d) {
    if (!(k > 0.0)) throw std::invalid_argument("critical_stiffness: k must be > 0");
    if (!(d > 0.0))
        throw std::invalid_argument("critical_stiffness: d must be > 0 (the infimum is not attained at d = 0)");
    const double lo = 1e-3, hi = 1e3;
    const int n = 2048;
    int best = 0;
    double best_val = instability_rhs(lo, k, d);
    for (int i = 1; i < n; ++i) {
        const double v = instability_rhs(log_spaced(lo, hi, i, n), k, d);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    const double a = log_spaced(lo, hi, std::max(0, best - 1), n);
    const double b = log_spaced(lo, hi, std::min(n - 1, best + 1), n);
    const double lam = golden_min([&](double x) { return instability_rhs(x, k, d); }, a, b, 1e-10);
    return CriticalCurvePoint{k, d, lam, instability_rhs(lam, k, d)};
}

namespace {

// Value whose zeros are the real-branch eigenvalues, expressed in xi:
// (alpha xi - beta) phi(xi) - (1 - beta).
double root_fn(double xi, double alpha, double beta) {
    return (alpha * xi - beta) * phi(xi) - (1.0 - beta);
}

double bisect_root(double a, double b, double fa, double alpha, double beta) {
    // Keeps the invariant sign(f(a)) == sign(fa) != sign(f(b)).
    for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (a + b);
        if ((b - a) <= 1e-12 * m) return m;
        const double fm = root_fn(m, alpha, beta);
        if (fm == 0.0) return m;
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

DispersionResult growth_rate(double lambda, const ModelParams& p) {
    validate(p);
    if (!(lambda > 0.0)) throw std::invalid_argument("growth_rate: lambda must be > 0");
    DispersionResult res;
    res.lambda = lambda;

    const double kl = p.k * lambda;
    const double alpha = (1.0 - p.k) / kl;
    const double beta = response_slope(p) / (p.k * (1.0 + p.d * lambda * lambda));
    if (beta == 1.0) {
        // The root equation degenerates to (alpha xi - 1) phi(xi) = 0 whose
        // admissible solution carries mu1 = -1.
        res.xi = kl / (1.0 - p.k); // consistent with mu1 = -1 only for k < 1
        res.mu1 = -1.0;
        res.unstable = false;
        if (!(p.k < 1.0)) res.xi.reset();
        return res;
    }

    // Log-spaced sign-change scan. The scan grid is augmented with the psi
    // pole beta/alpha and with k*lambda so no bracket straddles a known
    // structural point.
    const double lo = 1e-8;
    const double hi = std::max(1e3, 10.0 * kl);
    const int n = 6000;
    std::vector<double> grid;
    grid.reserve(n + 4);
    for (int i = 0; i < n; ++i) grid.push_back(log_spaced(lo, hi, i, n));
    if (kl > lo && kl < hi) grid.push_back(kl);
    if (alpha != 0.0) {
        const double pole = beta / alpha;
        if (pole > lo && pole < hi) {
            grid.push_back(std::nextafter(pole, 0.0));
            grid.push_back(std::nextafter(pole, hi));
        }
    }
    std::sort(grid.begin(), grid.end());

    double best_xi = 0.0;
    bool found = false;
    double fa = root_fn(grid[0], alpha, beta);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double fb = root_fn(grid[i], alpha, beta);
        if (fa == 0.0) {
            best_xi = grid[i - 1];
            found = true;
            break;
        }
        if ((fa < 0.0) != (fb < 0.0)) {
            best_xi = bisect_root(grid[i - 1], grid[i], fa, alpha, beta);
            found = true;
            break;
        }
        fa = fb;
    }
    if (!found) return res; // no real root on this branch: reported stable, rate absent

    res.xi = best_xi;
    res.mu1 = lambda / best_xi - 1.0 / p.k;
    res.unstable = *res.mu1 > 0.0;
    return res;
}

namespace {

struct ClosedFormTerms {
    double atan_diff; // atan(xi(mu2+1)) - atan(xi(mu2-1))
    double log_ratio; // log[(xi^-2+(mu2-1)^2)/(xi^-2+(mu2+1)^2)]
    double coeff;     // alpha - beta/xi
    double beta;
};

ClosedFormTerms closed_form_terms(double mu1, double mu2, double lambda, const ModelParams& p) {
    const DispersionAux a = dispersion_aux(lambda, mu1, p);
    ClosedFormTerms t;
    t.atan_diff = std::atan(a.xi * (mu2 + 1.0)) - std::atan(a.xi * (mu2 - 1.0));
    const double inv_xi2 = 1.0 / (a.xi * a.xi);
    t.log_ratio = std::log((inv_xi2 + (mu2 - 1.0) * (mu2 - 1.0)) / (inv_xi2 + (mu2 + 1.0) * (mu2 + 1.0)));
    t.coeff = a.alpha - a.beta / a.xi;
    t.beta = a.beta;
    return t;
}

} // namespace

double residual_i1(double mu1, double mu2, double lambda, const ModelParams& p) {
    const ClosedFormTerms t = closed_form_terms(mu1, mu2, lambda, p);
    return t.coeff * t.atan_diff + 0.5 * mu2 * t.beta * t.log_ratio - (2.0 - 2.0 * t.beta);
}

double residual_i2(double mu1, double mu2, double lambda, const ModelParams& p) {
    const ClosedFormTerms t = closed_form_terms(mu1, mu2, lambda, p);
    return mu2 * t.beta * t.atan_diff + 0.5 * t.coeff * (-t.log_ratio);
}

bool case_oracle(const DispersionAux& aux, double k_lambda, int grid_points) {
    if (!(k_lambda > 0.0)) throw std::invalid_argument("case_oracle: k_lambda must be > 0");
    if (grid_points < 100000) grid_points = 100000;
    const double alpha = aux.alpha, beta = aux.beta;
    const double pole = (alpha != 0.0) ? beta / alpha : -1.0;

    // Uniform grid on (0, k_lambda); brackets containing the psi pole are
    // skipped (the sign flip across a pole is not an intersection).
    const double h = k_lambda / (grid_points + 1);
    bool have_prev = false;
    double prev = 0.0;
    for (int i = 1; i <= grid_points; ++i) {
        const double xi = i * h;
        const double denom = alpha * xi - beta;
        if (denom == 0.0) {
            have_prev = false;
            continue;
        }
        const double diff = phi(xi) - (1.0 - beta) / denom;
        if (have_prev) {
            const bool crosses_pole = pole > 0.0 && (xi - h) < pole && pole < xi;
            if (!crosses_pole && ((prev < 0.0) != (diff < 0.0) || diff == 0.0)) return true;
        }
        prev = diff;
        have_prev = true;
    }
    return false;
}

std::optional<UnstableBand> unstable_band(const ModelParams& p) {
    validate(p);
    const double ratio = stiffness_ratio(p);
    const CriticalCurvePoint crit = critical_stiffness(p.k, p.d); // rejects d == 0
    if (!(ratio > crit.critical_stiffness)) return std::nullopt;

    // instability_rhs - ratio is negative at the argmin and diverges to +inf
    // on both sides, so each endpoint is a single bracketed sign change.
    auto g = [&](double lam) { return instability_rhs(lam, p.k, p.d) - ratio; };
    auto bisect = [&](double neg, double pos) {
        for (int it = 0; it < 200; ++it) {
            const double m = 0.5 * (neg + pos);
            if (std::fabs(pos - neg) <= 1e-10 * m) return m;
            if (g(m) < 0.0) neg = m;
            else pos = m;
        }
        return 0.5 * (neg + pos);
    };

    double lo = crit.lambda_argmin, lo_neg = crit.lambda_argmin;
    while (g(lo) < 0.0) {
        lo_neg = lo;
        lo *= 0.5;
    }
    const double lambda_lo = bisect(lo_neg, lo);

    // Above sqrt((ratio - 1)/d) the mode is provably stable, so the upper
    // endpoint lies between the argmin and that bound.
    double hi = std::sqrt((ratio - 1.0) / p.d), hi_neg = crit.lambda_argmin;
    while (g(hi) < 0.0) {
        hi_neg = hi;
        hi *= 2.0;
    }
    const double lambda_hi = bisect(hi_neg, hi);
    return UnstableBand{lambda_lo, lambda_hi};
}

std::optional<MostUnstableMode> most_unstable_mode(const ModelParams& p) {
    const auto band = unstable_band(p);
    if (!band) return std::nullopt;
    auto value = [&](double lam) {
        const DispersionResult r = growth_rate(lam, p);
        return r.mu1 ? *r.mu1 : -1.0; // just outside the band the branch may lose its root
    };

    // Coarse interior scan picks the basin, golden-section refines in it.
    const int n = 201;
    const double span = band->lambda_hi - band->lambda_lo;
    int best_i = 1;
    double best = -2.0;
    for (int i = 1; i < n - 1; ++i) {
        const double v = value(band->lambda_lo + span * i / (n - 1));
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    double a = band->lambda_lo + span * (best_i - 1) / (n - 1);
    double b = band->lambda_lo + span * (best_i + 1) / (n - 1);
    const double gr = 0.6180339887498948482;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = value(c), fd = value(d);
    while (b - a > 1e-10 * band->lambda_hi) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = value(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = value(d);
        }
    }
    const double lam = 0.5 * (a + b);
    return MostUnstableMode{lam, value(lam)};
}

} // namespace chemotax
