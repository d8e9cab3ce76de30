#include "chemotax/field.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace chemotax {

void validate(const FieldGrid& g) {
    if (g.sites < 4) throw std::invalid_argument("FieldGrid: need at least 4 sites, got " + std::to_string(g.sites));
    if (!(g.dx > 0.0)) throw std::invalid_argument("FieldGrid: dx must be > 0");
}

ChemoattractantSolver::ChemoattractantSolver(const FieldGrid& g, double d) : grid_(g), d_(d) {
    validate(g);
    if (!(d >= 0.0)) throw std::invalid_argument("ChemoattractantSolver: d must be >= 0");
    r_ = d / (g.dx * g.dx);
    if (r_ == 0.0) return; // identity system, solve() copies

    const std::size_t n = static_cast<std::size_t>(g.sites);
    const double b = 1.0 + 2.0 * r_;
    const double off = -r_;     // sub- and superdiagonal
    const double corner = -r_;  // periodic wrap entries
    const double gamma = -b;
    beta_over_gamma_ = corner / gamma;

    // Thomas factorization of the corner-stripped system. Diagonal entries:
    // b - gamma at 0, b - corner^2/gamma at n-1, b elsewhere; strictly
    // diagonally dominant, so no pivoting is needed.
    inv_w_.resize(n);
    p_.resize(n);
    double w = b - gamma;
    inv_w_[0] = 1.0 / w;
    p_[0] = off * inv_w_[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double bi = (i == n - 1) ? b - corner * corner / gamma : b;
        w = bi - off * p_[i - 1];
        inv_w_[i] = 1.0 / w;
        p_[i] = off * inv_w_[i];
    }

    // Rank-one column u = (gamma, 0, ..., 0, corner): z = A'^{-1} u.
    z_.assign(n, 0.0);
    z_[0] = gamma * inv_w_[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double rhs = (i == n - 1) ? corner : 0.0;
        z_[i] = (rhs - off * z_[i - 1]) * inv_w_[i];
    }
    for (std::size_t i = n - 1; i-- > 0;) z_[i] -= p_[i] * z_[i + 1];

    corner_denom_ = 1.0 + z_[0] + beta_over_gamma_ * z_[n - 1];
    scratch_.resize(n);
}

void ChemoattractantSolver::solve(std::span<const double> rho, std::span<double> out) const {
    const std::size_t n = static_cast<std::size_t>(grid_.sites);
    if (rho.size() != n || out.size() != n)
        throw std::invalid_argument("ChemoattractantSolver::solve: size mismatch");
    if (r_ == 0.0) {
        for (std::size_t i = 0; i < n; ++i) out[i] = rho[i];
        return;
    }
    const double off = -r_;
    double* y = scratch_.data();
    y[0] = rho[0] * inv_w_[0];
    for (std::size_t i = 1; i < n; ++i) y[i] = (rho[i] - off * y[i - 1]) * inv_w_[i];
    for (std::size_t i = n - 1; i-- > 0;) y[i] -= p_[i] * y[i + 1];

    const double factor = (y[0] + beta_over_gamma_ * y[n - 1]) / corner_denom_;
    for (std::size_t i = 0; i < n; ++i) out[i] = y[i] - factor * z_[i];
}

std::vector<double> ChemoattractantSolver::solve(std::span<const double> rho) const {
    std::vector<double> out(rho.size());
    solve(rho, out);
    return out;
}

std::vector<double> solve_chemoattractant(std::span<const double> rho, const FieldGrid& g, double d) {
    return ChemoattractantSolver(g, d).solve(rho);
}

double mass_identity_check(std::span<const double> s, std::span<const double> rho) {
    if (s.size() != rho.size()) throw std::invalid_argument("mass_identity_check: size mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) acc += s[i] - rho[i];
    return std::fabs(acc);
}

double field_residual_inf(std::span<const double> s, std::span<const double> rho, const FieldGrid& g, double d) {
    validate(g);
    const std::size_t n = static_cast<std::size_t>(g.sites);
    if (s.size() != n || rho.size() != n) throw std::invalid_argument("field_residual_inf: size mismatch");
    const double r = d / (g.dx * g.dx);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double sm = s[(i + n - 1) % n];
        const double sp = s[(i + 1) % n];
        const double res = -r * (sp - 2.0 * s[i] + sm) + s[i] - rho[i];
        worst = std::max(worst, std::fabs(res));
    }
    return worst;
}

} // namespace chemotax
