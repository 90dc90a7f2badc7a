#include "cellfront/mechanics.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

namespace cellfront {

namespace {

/// Bracket-width stopping rule: absolute floor `scale*tol` plus `tol` relative.
struct ScaledTol {
    double tol;
    double scale;
    bool operator()(double a, double b) const {
        return (b - a) <= tol * scale + tol * std::max(std::abs(a), std::abs(b));
    }
};

} // namespace

CubicForceCoeffs jkr_coefficients(const JkrParams& p) {
    p.validate();
    const double Et = p.etilde();
    const double pig = M_PI * p.gamma;
    const double third = 1.0 / 3.0;
    // Equilibrium distance: twice the radius minus the adhesive flattening.
    const double d_eq = 2.0 * p.R -
        0.5 * std::pow(pig, 2.0 * third) * std::cbrt(3.0 * p.R) / std::pow(Et, 2.0 * third);
    if (!(d_eq > 0.0))
        throw NonPositiveEquilibriumDistance(
            "equilibrium distance is nonpositive for the given contact parameters");
    const double a1 = -0.6 * std::pow(3.0 * p.R * Et, 2.0 * third) * std::cbrt(pig) * d_eq;
    const double a2 = (33.0 / 125.0) * std::pow(Et, 4.0 * third) * std::cbrt(3.0 * p.R) /
                      std::cbrt(pig) * d_eq * d_eq;
    const double a3 = (209.0 / 3125.0) * (Et * Et / pig) * d_eq * d_eq * d_eq;
    return CubicForceCoeffs{d_eq, a1, a2, a3};
}

double pressure_inverse(double P, const ForceLaw& law) {
    if (!(P >= 0.0))
        throw NonConvergence("pressure_inverse: pressure must be nonnegative");
    if (P == 0.0) return law.rho_eq;
    const double sup = pressure_sup(law);
    if (!(P < sup))
        throw NonConvergence("pressure_inverse: pressure at or above the finite supremum");
    double lo = law.rho_eq;
    double hi = 2.0 * law.rho_eq;
    while (pressure(hi, law) < P) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12 * law.rho_eq)
            throw NonConvergence("pressure_inverse: bracket expansion exhausted");
    }
    auto f = [&](double r) { return pressure(r, law) - P; };
    std::uintmax_t iter = 200;
    const auto r = boost::math::tools::toms748_solve(f, lo, hi, ScaledTol{1e-12, 0.0}, iter);
    if (iter >= 200)
        throw NonConvergence("pressure_inverse: iteration cap reached");
    return 0.5 * (r.first + r.second);
}

double density_from_force(double f, const ForceLaw& law) {
    if (!(f >= 0.0))
        throw NonConvergence("density_from_force: force must be nonnegative");
    if (f == 0.0) return law.rho_eq;
    // Compression force is bounded by its value at vanishing gap.
    const double fmax = force_cubic(0.0, law.coeffs);
    if (!(f < fmax))
        throw NonConvergence("density_from_force: force above the attainable range");
    double lo = law.rho_eq;
    double hi = 2.0 * law.rho_eq;
    while (law.force_at_density(hi) < f) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12 * law.rho_eq)
            throw NonConvergence("density_from_force: bracket expansion exhausted");
    }
    auto g = [&](double rho) { return law.force_at_density(rho) - f; };
    std::uintmax_t iter = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, ScaledTol{1e-12, 0.0}, iter);
    if (iter >= 200)
        throw NonConvergence("density_from_force: iteration cap reached");
    return 0.5 * (r.first + r.second);
}

double force_implicit_jkr(double d, const JkrParams& p, double tol) {
    p.validate();
    if (!(tol > 0.0)) throw ConfigError("force_implicit_jkr: tol must be positive");
    const double Rij = 0.5 * p.R;       // reduced radius of two equal cells
    const double Eij = p.etilde();
    const double pig = M_PI * p.gamma;
    const double alpha = 3.0 * pig * Rij;  // adhesion force scale

    // Separation as a function of the contact force, on the physical branch
    // (positive root of the discriminant, F >= -alpha/2 up to pull-off).
    auto d_of_F = [&](double F) {
        const double disc = 2.0 * alpha * F + alpha * alpha;
        const double acube = (3.0 * Rij / (4.0 * Eij)) * (F + alpha + std::sqrt(disc));
        const double a = std::cbrt(acube);
        const double delta = a * a / Rij - std::sqrt(2.0 * pig * a / Eij);
        return 2.0 * p.R - delta;
    };

    const double Flo = -0.5 * alpha * (1.0 - 1e-12);
    const double d_max = d_of_F(Flo);  // pull-off separation: largest attainable d
    if (!(d <= d_max))
        throw NoBracket("force_implicit_jkr: separation beyond the pull-off point");

    double Fhi = alpha;
    while (d_of_F(Fhi) > d) {
        Fhi *= 2.0;
        if (Fhi > 1e12 * alpha)
            throw NoBracket("force_implicit_jkr: bracket expansion exhausted");
    }

    auto g = [&](double F) { return d_of_F(F) - d; };  // strictly decreasing in F
    std::uintmax_t iter = 300;
    const auto r = boost::math::tools::toms748_solve(g, Flo, Fhi, ScaledTol{tol, alpha}, iter);
    if (iter >= 300)
        throw NonConvergence("force_implicit_jkr: iteration cap reached");
    return 0.5 * (r.first + r.second);
}

} // namespace cellfront
