/**
 * @file mechanics.hpp
 * @brief Constitutive laws: intercellular force, nonlinear diffusion
 *        coefficient, barotropic pressure, and proliferation rate.
 *
 * All quantities are SI internally: distances in m, densities in 1/m, forces
 * in N, damping in kg/s, diffusivity and pressure potential in m^2/s.
 *
 * The production force law is a cubic polynomial in the displacement from the
 * equilibrium distance, with a hard zero for separations at or beyond it; the
 * full adhesive-contact law (implicit in the contact radius) is retained as a
 * slow reference implementation for validation.
 */
#ifndef CELLFRONT_MECHANICS_HPP
#define CELLFRONT_MECHANICS_HPP

#include <cmath>

#include "cellfront/errors.hpp"

namespace cellfront {

/**
 * Physical parameters of the adhesive elastic contact between two identical
 * spherical cells.
 */
struct JkrParams {
    double R;      ///< cell radius (m)
    double E;      ///< Young's modulus (Pa)
    double nu;     ///< Poisson ratio (dimensionless, 0 <= nu < 1)
    double gamma;  ///< adhesion strength (N/m)

    /** Effective elastic modulus E / (2 (1 - nu^2)) (Pa). */
    double etilde() const { return E / (2.0 * (1.0 - nu * nu)); }

    /** Throws ConfigError unless all parameter invariants hold. */
    void validate() const {
        if (!(R > 0.0) || !(E > 0.0) || !(gamma > 0.0) ||
            !(nu >= 0.0 && nu < 1.0))
            throw ConfigError("JkrParams out of range (need R,E,gamma > 0 and 0 <= nu < 1)");
    }
};

/** Coefficients of the cubic force law around the equilibrium distance. */
struct CubicForceCoeffs {
    double d_eq;  ///< equilibrium intercellular distance (m)
    double a1;    ///< linear coefficient (negative: repulsion dominates near d_eq)
    double a2;    ///< quadratic coefficient
    double a3;    ///< cubic coefficient
};

/**
 * Derives the equilibrium distance and cubic coefficients from the contact
 * parameters.
 *
 * @throws NonPositiveEquilibriumDistance if the parameters put the
 *         equilibrium distance at or below zero (physically inconsistent).
 */
CubicForceCoeffs jkr_coefficients(const JkrParams& p);

/**
 * Cubic force law: a3 (d - d_eq)^3 + a2 (d - d_eq)^2 + a1 (d - d_eq) for
 * d < d_eq, and exactly 0 for d >= d_eq (no attraction tail).  Positive values
 * mean repulsion. Total on d >= 0.
 */
inline double force_cubic(double d, const CubicForceCoeffs& c) {
    if (d >= c.d_eq) return 0.0;
    const double x = d - c.d_eq;
    return ((c.a3 * x + c.a2) * x + c.a1) * x;
}

/** Derivative dF/dd of force_cubic; 0 for d >= d_eq. */
inline double force_cubic_derivative(double d, const CubicForceCoeffs& c) {
    if (d >= c.d_eq) return 0.0;
    const double x = d - c.d_eq;
    return (3.0 * c.a3 * x + 2.0 * c.a2) * x + c.a1;
}

/**
 * Force law of one population: cubic coefficients plus the damping
 * coefficient, with the equilibrium density rho_eq = 1/d_eq cached.
 */
struct ForceLaw {
    CubicForceCoeffs coeffs;
    double eta;     ///< damping coefficient (kg/s)
    double rho_eq;  ///< equilibrium density 1/d_eq (1/m)

    /** F at intercellular distance d (N). */
    double force_at_gap(double d) const { return force_cubic(d, coeffs); }
    /** F at the gap 1/rho implied by a local density (N). */
    double force_at_density(double rho) const { return force_cubic(1.0 / rho, coeffs); }
};

/** Builds a ForceLaw from contact parameters and a damping coefficient. */
inline ForceLaw make_force_law(const JkrParams& p, double eta) {
    const CubicForceCoeffs c = jkr_coefficients(p);
    return ForceLaw{c, eta, 1.0 / c.d_eq};
}

/**
 * Contact-inhibited proliferation law: rate alpha down-ramped to zero around
 * the inhibition density rho_M by a quintic smoothstep of half-width
 * 6*eps_abs.  The ramp reaches the values 1 and 0 exactly (compact support of
 * the growth nonlinearity), equals 1/2 exactly at rho_M, and is C^2 and
 * monotone.
 */
struct GrowthLaw {
    double alpha;    ///< maximal proliferation rate (1/s)
    double rho_M;    ///< contact-inhibition density (1/m)
    double eps_abs;  ///< smoothing scale (1/m); ramp half-width is 6*eps_abs

    /** Ramp half-width W: the rate is exactly alpha below rho_M - W. */
    double width() const { return 6.0 * eps_abs; }
    /** Density at which proliferation has shut off exactly: rho_M + W. */
    double rho_plateau() const { return rho_M + width(); }
};

/**
 * Proliferation rate G(rho) = alpha * H(rho_M - rho), H the smoothed step.
 * Exactly alpha for rho <= rho_M - W, exactly 0 for rho >= rho_M + W,
 * alpha/2 at rho_M.
 */
inline double growth_rate(double rho, const GrowthLaw& g) {
    const double W = g.width();
    const double x = g.rho_M - rho;
    if (x >= W) return g.alpha;
    if (x <= -W) return 0.0;
    const double t = (x + W) / (2.0 * W);                 // in (0, 1)
    double h = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    // Rounding may push h an ulp outside [0, 1] next to the plateaus.
    h = h < 0.0 ? 0.0 : (h > 1.0 ? 1.0 : h);
    return g.alpha * h;
}

/**
 * Nonlinear diffusion coefficient induced by the force law:
 * D(rho) = -F'(1/rho) / (eta rho^2) for rho > rho_eq, and 0 for
 * rho <= rho_eq (degenerate below the equilibrium density).
 */
inline double diffusion_coeff(double rho, const ForceLaw& law) {
    if (rho <= law.rho_eq) return 0.0;
    return -force_cubic_derivative(1.0 / rho, law.coeffs) / (law.eta * rho * rho);
}

/**
 * Barotropic pressure potential P(rho) with dP/drho = D(rho)/rho and
 * P(rho_eq) = 0; identically 0 below rho_eq.  Closed form obtained by exact
 * integration of the cubic-law diffusion coefficient; strictly increasing on
 * (rho_eq, infinity) with a finite supremum.
 */
inline double pressure(double rho, const ForceLaw& law) {
    if (rho <= law.rho_eq) return 0.0;
    const double re = law.rho_eq;
    const double A1 = law.coeffs.a1 * re * re - 2.0 * law.coeffs.a2 * re + 3.0 * law.coeffs.a3;
    const double A2 = law.coeffs.a2 * re * re - 3.0 * law.coeffs.a3 * re;
    const double A3 = law.coeffs.a3 * re * re;
    const auto bracket = [&](double r) {
        return 0.5 * A1 * r * r + (2.0 / 3.0) * A2 * r + 0.75 * A3;
    };
    const double r2 = rho * rho;
    const double re2 = re * re;
    return bracket(rho) / (law.eta * re2 * r2 * r2) -
           bracket(re) / (law.eta * re2 * re2 * re2);
}

/** Finite supremum of the pressure potential, lim_{rho->inf} P(rho). */
inline double pressure_sup(const ForceLaw& law) {
    const double re = law.rho_eq;
    const double A1 = law.coeffs.a1 * re * re - 2.0 * law.coeffs.a2 * re + 3.0 * law.coeffs.a3;
    const double A2 = law.coeffs.a2 * re * re - 3.0 * law.coeffs.a3 * re;
    const double A3 = law.coeffs.a3 * re * re;
    const double bracket_eq = 0.5 * A1 * re * re + (2.0 / 3.0) * A2 * re + 0.75 * A3;
    const double re2 = re * re;
    return -bracket_eq / (law.eta * re2 * re2 * re2);
}

/**
 * Inverse of the pressure potential: the unique rho >= rho_eq with
 * pressure(rho) = P, found by bracketed root-finding to 1e-12 relative.
 * Returns rho_eq exactly for P = 0.
 *
 * @throws NonConvergence if P is negative, at or above the supremum of P, or
 *         the iteration fails.
 */
double pressure_inverse(double P, const ForceLaw& law);

/**
 * Inverse of the density-to-force map: the density rho >= rho_eq whose
 * implied gap carries force f, i.e. force_at_density(rho) = f.  Returns
 * rho_eq for f = 0.
 *
 * @throws NonConvergence if f is negative or not attainable by compression.
 */
double density_from_force(double f, const ForceLaw& law);

/**
 * Reference adhesive-contact force at separation d, obtained by solving the
 * implicit contact-radius system by bracketed root-finding on F to relative
 * tolerance tol (scale: the adhesion force 3 pi gamma R/2).  Covers both the
 * compressive branch (d < d_eq) and the tension branch down to the pull-off
 * point.
 *
 * @throws NoBracket       if d lies outside the attainable separation range.
 * @throws NonConvergence  if the iteration fails to converge.
 */
double force_implicit_jkr(double d, const JkrParams& p, double tol);

} // namespace cellfront

#endif // CELLFRONT_MECHANICS_HPP
