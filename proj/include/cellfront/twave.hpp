/**
 * @file twave.hpp
 * @brief Travelling-wave profiles of the two-population front in the
 *        co-moving frame: the linear rear plug, the proliferating tail, and
 *        the shooting construction of the wave speed.
 *
 * In the frame z = x - c t the front consists of a finite plug of the
 * passive population on [0, ell] and a semi-infinite tail of the growing
 * population on z < 0.  The plug pressure is exactly linear with slope -c
 * and its width ell is pinned by the prescribed plug mass; the tail pressure
 * solves a backward final-value problem from the interface and must level
 * off at the growth-arrest plateau as z -> -infinity, which singles out the
 * wave speed c.
 */
#ifndef CELLFRONT_TWAVE_HPP
#define CELLFRONT_TWAVE_HPP

#include <Eigen/Dense>

#include <vector>

#include "cellfront/errors.hpp"
#include "cellfront/fbp.hpp"
#include "cellfront/mechanics.hpp"

namespace cellfront {

/**
 * Sampled travelling wave in the co-moving frame.
 *
 * Invariants of a profile returned by find_wave_speed:
 *  - P_B is exactly linear on zgrid_B with slope -c, and P_B(ell) is the
 *    pressure at the density carrying the rear-edge force eta_B*c/2
 *    (strictly above the force-free pressure, so rho_B(ell) > rho_eq_B);
 *  - rho_A and rho_B are strictly decreasing along their (ascending) grids;
 *  - rho_A at z_min lies within the shooting tolerance of the growth-arrest
 *    plateau density;
 *  - the quadrature of rho_B over [0, ell] reproduces M;
 *  - the pressure slopes match at the interface: P_A'(0-) = P_B'(0+) = -c.
 */
struct WaveProfile {
    double c = 0.0;    ///< wave speed (m/s)
    double ell = 0.0;  ///< plug width (m)
    double M = 0.0;    ///< plug mass (cells, dimensionless)
    Eigen::VectorXd zgrid_A;  ///< ascending samples in [z_min, 0]
    Eigen::VectorXd zgrid_B;  ///< ascending samples in [0, ell]
    Eigen::VectorXd P_A;      ///< tail pressure samples (m^2/s)
    Eigen::VectorXd P_B;      ///< plug pressure samples (m^2/s)
    Eigen::VectorXd rho_A;    ///< tail density samples (1/m)
    Eigen::VectorXd rho_B;    ///< plug density samples (1/m)
};

/** Rear-plug piece of the wave (the passive population on [0, ell]). */
struct PlugProfile {
    double ell = 0.0;         ///< plug width (m)
    Eigen::VectorXd zgrid;    ///< ascending samples in [0, ell]
    Eigen::VectorXd P;        ///< pressure samples, exactly linear (m^2/s)
    Eigen::VectorXd rho;      ///< density samples (1/m)
};

/** Tail piece of the wave (the growing population on [z_min, 0]). */
struct TailProfile {
    Eigen::VectorXd zgrid;  ///< ascending samples in [z_min, 0]
    Eigen::VectorXd P;      ///< pressure samples (m^2/s)
    Eigen::VectorXd rho;    ///< density samples (1/m)
};

/** Numerical knobs of the wave construction. */
struct WaveOptions {
    int samples_A = 2000;      ///< tail sample intervals
    int samples_B = 200;       ///< plug sample intervals
    double shot_rtol = 1e-10;  ///< relative tolerance of the tail integration
    /// Absolute tolerance of the tail integration.  Applies to the
    /// internally rescaled state: pressure in units of the growth-plateau
    /// pressure and cumulative flux in units of the wave speed times the
    /// plateau density, both O(1) on a levelling trajectory.
    double shot_atol = 1e-14;
    /// Standalone tail ceiling: relative margin above the plateau pressure at
    /// which the profile is declared blown up.  The shooting uses
    /// 10*tol instead.
    double guard_rel = 1e-2;
    int max_bisect = 200;      ///< wave-speed bisection iteration cap
};

/**
 * Rear plug at speed c carrying mass M: pressure exactly linear with slope
 * -c, anchored at the rear edge by the force balance
 * F_B(1/rho(ell)) = eta_B*c/2, with the width ell solved by bisection on the
 * monotone map ell -> integral of rho_B over [0, ell] = M.
 *
 * @throws ConfigError       unless c > 0 and M > 0.
 * @throws BisectionFailure  if M exceeds the plug capacity at this speed
 *                           (the pressure potential has a finite supremum,
 *                           so the capacity scales like 1/c).
 */
PlugProfile wave_profile_B(double c, double M, const ForceLaw& law_B,
                           const WaveOptions& opt = {});

/**
 * Tail profile at speed c from the interface pressure P_A0: integrates the
 * augmented final-value system
 *
 *   P' = -c + I/rho,   I(z) = integral over [z, 0] of G(rho) rho,
 *
 * backward from z = 0 (where I = 0, hence P'(0) = -c exactly) to z_min,
 * with rho = the density at pressure P.  Sampled on a uniform grid.
 *
 * @throws ConfigError    unless c > 0, z_min < 0 and P_A0 lies strictly
 *                        between 0 and the pressure supremum.
 * @throws ProfileBlowup  if the pressure exceeds the growth-plateau guard or
 *                        falls to the force-free value before z_min (either
 *                        way the profile cannot level off: wrong speed).
 */
TailProfile wave_profile_A(double c, double P_A0, const ForceLaw& law_A,
                           const GrowthLaw& growth, double z_min,
                           const WaveOptions& opt = {});

/**
 * Full wave construction: bisection on c.  Each trial builds the plug,
 * transfers the interface pressure through the damped force balance
 * F_A/eta_A = F_B/eta_B, and shoots the tail; a trial is an overshoot when
 * the tail pressure exceeds the plateau guard (or the plug cannot carry M),
 * an undershoot when the pressure slope turns around (equivalently when it
 * undershoots the plateau at z_min).  Converges when the tail pressure at
 * z_min is within tol (relative) of the plateau pressure.
 *
 * The upper speed bracket starts at the plug capacity speed (the c at which
 * the plug can just carry M), the lower at 1e-6 of it.
 *
 * @throws ConfigError     on invalid inputs.
 * @throws NoSignChange    if the initial bracket does not classify as
 *                         (undershoot, overshoot).
 * @throws NonConvergence  if the bisection exhausts its iteration cap
 *                         without meeting the plateau tolerance.
 */
WaveProfile find_wave_speed(double M, const ForceLaw& law_A,
                            const ForceLaw& law_B, const GrowthLaw& growth,
                            double z_min, double tol,
                            const WaveOptions& opt = {});

/** Per-snapshot profile mismatch of a front-tracking run against a wave. */
struct WaveFitReport {
    std::vector<double> t;         ///< snapshot times inside the window
    std::vector<double> l2_rel;    ///< relative L2 density error on the overlap
    std::vector<double> linf_rel;  ///< relative Linf density error on the overlap
    double c_measured = 0.0;       ///< fitted interface speed over the window
    double speed_gap = 0.0;        ///< c_measured - profile.c (m/s)
};

/**
 * Compares late-time snapshots of a continuum run against a travelling-wave
 * profile: each snapshot in [t_lo, t_hi] is shifted so its interface sits at
 * z = 0 and the profile densities are interpolated onto the snapshot's nodes
 * over the overlapping z ranges of both populations; reports combined
 * relative L2/Linf errors per snapshot plus the measured-vs-constructed
 * speed gap.
 *
 * @throws InsufficientData     if the window holds fewer than 10 snapshots
 *                              (front-speed fit requirement).
 * @throws InsufficientOverlap  if fewer than 4 nodes of either population
 *                              fall inside the profile's z range.
 */
WaveFitReport compare_wave_to_fbp(const WaveProfile& profile,
                                  const FbpTrajectory& traj, double t_lo,
                                  double t_hi);

} // namespace cellfront

#endif // CELLFRONT_TWAVE_HPP
