#pragma once

#include <span>
#include <vector>

namespace chemotax {

// Periodic 1-D lattice; site i covers [i*dx, (i+1)*dx), centers at (i+1/2)*dx.
struct FieldGrid {
    int sites = 0;
    double dx = 0.0;
    double length() const { return sites * dx; }
    double center(int i) const { return (i + 0.5) * dx; }
};

// Throws std::invalid_argument unless sites >= 4 and dx > 0.
void validate(const FieldGrid& g);

// Solves the screened diffusion balance on the periodic lattice,
//   -(d/dx^2) (S[i+1] - 2 S[i] + S[i-1]) + S[i] = rho[i],
// a cyclic tridiagonal system handled by a Thomas sweep plus a rank-one
// (Sherman-Morrison) corner correction. Coefficients depend only on the grid
// and d, so the factorization is done once in the constructor.
class ChemoattractantSolver {
public:
    ChemoattractantSolver(const FieldGrid& g, double d);

    // out.size() must equal rho.size() == grid sites. Aliasing rho/out is allowed.
    void solve(std::span<const double> rho, std::span<double> out) const;
    std::vector<double> solve(std::span<const double> rho) const;

    const FieldGrid& grid() const { return grid_; }
    double diffusivity() const { return d_; }

private:
    FieldGrid grid_;
    double d_ = 0.0;
    double r_ = 0.0;                 // d/dx^2
    std::vector<double> inv_w_;      // Thomas pivot reciprocals
    std::vector<double> p_;          // Thomas superdiagonal ratios
    std::vector<double> z_;          // solve of the rank-one column
    double corner_denom_ = 1.0;      // 1 + v.z
    double beta_over_gamma_ = 0.0;
    mutable std::vector<double> scratch_;
};

// Convenience one-shot solve.
std::vector<double> solve_chemoattractant(std::span<const double> rho, const FieldGrid& g, double d);

// |sum(S - rho)|; exactly zero in exact arithmetic by the periodic telescope.
double mass_identity_check(std::span<const double> s, std::span<const double> rho);

// Max-norm residual of the discrete balance, for verification.
double field_residual_inf(std::span<const double> s, std::span<const double> rho, const FieldGrid& g, double d);

} // namespace chemotax
