#pragma once
// Continuum two-population front solver.
//
// Two degenerate nonlinear diffusion equations live on moving domains:
// population A (proliferating) on [s0, s1], population B (inert) on
// [s1, s2].  s0 is a fixed wall; s1 is the inter-population interface;
// s2 is the outer free edge.  Coupling at s1 is through force balance and
// matching of the one-sided transport velocities; the edge at s2 moves by a
// force-driven law with a Robin-type closure relating the edge density to
// its one-sided force gradient.
//
// Discretization: each domain is mapped to the fixed unit interval
// (front-fixing), where a vertex-centred finite-volume scheme in
// conservation form advances the scaled densities  u~ = L*u  (L the current
// domain length).  All four physical boundary fluxes are imposed as exactly
// zero in the moving-mesh sense — no mass crosses s0, s1, or s2 relative to
// the moving boundaries — which makes the trapezoid mass of population B a
// linear invariant, conserved to roundoff by any Runge-Kutta step.  The
// boundary physics enters through the front-velocity equations: ds1/dt from
// a 2x2 damped-Newton reconstruction of the one-sided interface traces,
// ds2/dt from a scalar root solve at the outer edge.  Face diffusivities
// and advective face values are central averages: at production resolutions
// the cell Peclet number is ~1e-2, and an upwind bias would dominate the
// spatial error budget without buying stability.

#include "cellfront/config.hpp"
#include "cellfront/errors.hpp"
#include "cellfront/mechanics.hpp"
#include "cellfront/odeint.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cellfront {

/** Continuum state: node densities on both mapped grids plus boundary data. */
struct FbpState {
    double t = 0.0;
    double s0 = 0.0;  ///< fixed left wall (m)
    double s1 = 0.0;  ///< interface position (m)
    double s2 = 0.0;  ///< outer edge position (m)
    Eigen::VectorXd uA;  ///< N_A+1 node densities on [s0, s1] (1/m)
    Eigen::VectorXd uB;  ///< N_B+1 node densities on [s1, s2] (1/m)

    int N_A() const { return static_cast<int>(uA.size()) - 1; }
    int N_B() const { return static_cast<int>(uB.size()) - 1; }

    /// Structural checks: sizes and finite positive densities throw
    /// ConfigError; an out-of-order boundary triple throws DomainCollapse.
    void validate() const;
};

/** Algebraic boundary closures evaluated for one state. */
struct InterfaceState {
    double rhoA_if;   ///< reconstructed A-side density trace at s1 (1/m)
    double rhoB_if;   ///< reconstructed B-side density trace at s1 (1/m)
    double flux_if;   ///< common one-sided transport velocity at s1 (m/s)
    double rhoB_end;  ///< reconstructed density trace at s2 (1/m)
};

/** Solver options bundle: physics laws plus scheme guards. */
struct FbpScheme {
    ForceLaw law_A;
    ForceLaw law_B;
    GrowthLaw growth;
    double interface_tol = 1e-12;  ///< relative Newton residual target at s1
    /// Physical grid spacings of the initial state; when positive, a domain
    /// shrinking below four such cells raises DomainCollapse.
    double hA_floor = 0.0;
    double hB_floor = 0.0;
};

/**
 * Reconstructs the interface traces at s1 from the two interior nodes on
 * each side.
 *
 * Unknowns (rhoA_if, rhoB_if) solve force balance
 *     F_A(1/rhoA_if)/eta_A = F_B(1/rhoB_if)/eta_B
 * together with equality of the one-sided transport velocities, each formed
 * from a 3-point one-sided difference of the force values (the unknown
 * trace plus the two supplied nodes at distances h and 2h).  flux_if is the
 * common velocity; the interface moves at ds1/dt = -flux_if.
 *
 * uA1/uA2 are the A-side nodes at distances hA and 2*hA left of s1;
 * uB1/uB2 the B-side nodes at hB and 2*hB right of s1.  rhoB_end is not
 * populated here (see robin_end_density).
 *
 * Stencils whose forces sit at or below the rounding quantum of the contact
 * law (about |F'(d_eq)|*eps*d_eq — densities within a few ulps of
 * equilibrium) are force-free to machine precision and return the
 * equilibrium traces with zero velocity exactly.  Throws InterfaceFailure
 * when the damped Newton iteration fails to reach the residual target.
 */
InterfaceState solve_interface(double uA1, double uA2, double hA, double uB1,
                               double uB2, double hB, const ForceLaw& law_A,
                               const ForceLaw& law_B, double tol = 1e-12);

/**
 * Reconstructs the outer-edge density trace at s2.
 *
 * The edge moves at ds2/dt = (2/eta_B) F_B(1/rho_end) while no mass crosses
 * it, which closes into the scalar relation  S_end + 2 u F_B(1/u) = 0  with
 * S_end the 3-point one-sided force-gradient stencil built from u and the
 * interior nodes uN1 (distance h) and uN2 (distance 2h).  The relation is
 * monotone in u; a force-free edge returns the equilibrium density exactly.
 * Throws InterfaceFailure if no bracket exists or the solve fails.
 */
double robin_end_density(double uN1, double uN2, double h,
                         const ForceLaw& law_B);

/** Time derivatives of an FbpState in grid-fraction form. */
struct FbpDerivs {
    Eigen::VectorXd duA;  ///< d(uA_j)/dt at fixed grid fraction (1/(m*s))
    Eigen::VectorXd duB;
    double ds1;
    double ds2;
    InterfaceState iface;  ///< closures used for the boundary motion
};

/**
 * Evaluates the semi-discrete right-hand side for one state.
 *
 * Throws DomainCollapse when a domain is nonpositive or (with floors set)
 * below four initial grid cells; propagates InterfaceFailure.
 */
FbpDerivs fbp_rhs(const FbpState& st, const FbpScheme& sch);

/** Snapshot sequence; each state carries its own time stamp. */
struct FbpTrajectory {
    std::vector<FbpState> snapshots;
};

/** Per-accepted-step interface diagnostics from a run. */
struct FbpDiagnostics {
    std::vector<double> t;
    std::vector<double> jump;       ///< uA(s1-) - uB(s1+), node traces (1/m)
    std::vector<double> residual;   ///< relative scaled-force mismatch at s1
    std::vector<double> s1, s2;     ///< boundary positions per accepted step
};

/** Constant-profile initial state from a config. */
FbpState fbp_initial_state(const SimConfig& cfg);

/**
 * Advances the continuum model from the config's initial state to time T,
 * emitting snapshots every snapshot_interval (linear interpolation between
 * accepted steps; the t = 0 state is always included).
 *
 * Density bounds (equilibrium below, the running caps above) are enforced at
 * every accepted step to a 1e-6 relative slack; violations raise
 * ToleranceNotMet.  Domain shrinkage below four initial cells raises
 * DomainCollapse.  When diag is non-null it receives per-accepted-step
 * interface node-trace diagnostics.
 */
FbpTrajectory fbp_run(const SimConfig& cfg, FbpDiagnostics* diag = nullptr);

/** Least-squares front speeds over a time window. */
struct FrontSpeeds {
    double c1;  ///< fitted ds1/dt (m/s)
    double c2;  ///< fitted ds2/dt (m/s)
    double resid1_rel;  ///< rms regression residual / |s1 displacement|
    double resid2_rel;
};

/**
 * Fits front speeds over snapshots with t in [t_lo, t_hi] (inclusive).
 * Throws InsufficientData with fewer than 10 snapshots in the window.
 * Stationary fronts report zero speed with zero relative residual.
 */
FrontSpeeds front_speed(const FbpTrajectory& traj, double t_lo, double t_hi);

/** Trapezoid masses on the mapped grids (cells, i.e. dimensionless). */
double trapezoid_mass_A(const FbpState& st);
double trapezoid_mass_B(const FbpState& st);

/** Interface node traces: the evolved boundary node values and their scaled-
 *  force mismatch (used for jump/transmission measurements; independent of
 *  the solve_interface reconstruction). */
struct NodeTraces {
    double rhoA_left;
    double rhoB_right;
    double jump;          ///< rhoA_left - rhoB_right (1/m)
    double residual_rel;  ///< |F_A/eta_A - F_B/eta_B| / max term; 0 when force-free
};
NodeTraces interface_node_traces(const FbpState& st, const FbpScheme& sch);

} // namespace cellfront
