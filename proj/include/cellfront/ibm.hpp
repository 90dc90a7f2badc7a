/**
 * @file ibm.hpp
 * @brief Off-lattice individual-based model: a pinned, overdamped chain of
 *        two cell populations with contact-inhibited proliferation.
 *
 * Population A occupies the first m positions and proliferates; population B
 * occupies the rest, never divides, and its count is conserved.  Mechanics
 * and proliferation are combined by first-order (Lie) splitting.
 *
 * Two proliferation drivers are provided:
 *  - proliferation_reindex: the single-step index-shift bookkeeping built on
 *    per-prefix ceilings (with its StepTooLarge guard), suitable for one
 *    isolated step and exercised directly by the unit tests;
 *  - ibm_advance: the production driver, which accrues per-gap division
 *    clocks across steps and inserts a daughter cell each time a clock
 *    crosses 1.  Repeating the per-step ceiling bookkeeping is not a
 *    convergent scheme (any positive accrual re-ceils to a whole division
 *    every step), so long runs must use the clock driver.
 */
#ifndef CELLFRONT_IBM_HPP
#define CELLFRONT_IBM_HPP

#include <Eigen/Dense>

#include <vector>

#include "cellfront/mechanics.hpp"
#include "cellfront/odeint.hpp"

namespace cellfront {

/**
 * Ordered chain of cell positions with the population split index.
 *
 * Invariants: r has at least two entries; r[0] == s0 exactly (pinned
 * anchor); strictly increasing positions; 1 <= m < n.
 */
struct CellChain {
    Eigen::VectorXd r;   ///< positions r_1..r_n (m), strictly increasing
    int m = 1;           ///< count of population-A cells (prefix of r)
    double s0 = 0.0;     ///< pinned position of the first cell (m)
    ForceLaw law_A;      ///< force law and damping of population A
    ForceLaw law_B;      ///< force law and damping of population B
    GrowthLaw growth;    ///< proliferation law (population A only)

    int n() const { return static_cast<int>(r.size()); }

    /** Throws ConfigError unless all chain invariants hold. */
    void validate() const;
};

enum class Population { A, B };

/** Density estimate attached to the left cell of one gap. */
struct DensitySample {
    double x;        ///< position of the left cell (m)
    double rho;      ///< 1 / gap width (1/m), > 0
    Population pop;  ///< population owning the gap
};

/**
 * Velocities of all cells under the damped spring dynamics:
 * v_1 = 0 (pinned);
 * v_i = (F_A(r_i - r_{i-1}) - F_A(r_{i+1} - r_i))/eta_A   for 2 <= i <= m-1;
 * v_m = F_A(r_m - r_{m-1})/eta_A - F_B(r_{m+1} - r_m)/eta_B;
 * v_i = (F_B(r_i - r_{i-1}) - F_B(r_{i+1} - r_i))/eta_B   for m+1 <= i <= n-1;
 * v_n = F_B(r_n - r_{n-1})/eta_B.
 */
Eigen::VectorXd chain_rhs(const CellChain& c);

/** chain_rhs on a bare position vector (no validation; integrator kernel). */
void chain_rhs_into(const Eigen::VectorXd& r, int m, const ForceLaw& law_A,
                    const ForceLaw& law_B, Eigen::VectorXd& v);

/**
 * Index shifts accrued over dtau: entry k (k = 0..m-3) is
 * ceil( sum_{j=2..k+2} g(r_j - r_{j-1}) * dtau ) in 1-based gap indices,
 * where g(gap) is the proliferation rate at density 1/gap.  Pure bookkeeping;
 * no bound is enforced here.
 */
std::vector<long> reindex_shifts(const CellChain& c, double dtau);

/**
 * One proliferation bookkeeping step: computes the index shifts over dtau,
 * moves each position to its shifted source, grows m by the last shift, and
 * restores strict ordering by nudging duplicated positions up by
 * 1e-6 * d_eq.  Population-B positions and count are preserved (their block
 * shifts uniformly).
 *
 * @throws StepTooLarge if any shift exceeds 1 (dtau must shrink).
 */
CellChain proliferation_reindex(const CellChain& c, double dtau);

/**
 * One split step: relaxes mechanics over dtau with the adaptive integrator,
 * then applies proliferation_reindex with the same dtau.
 *
 * A step whose relaxed positions violate the ordering invariant is rejected
 * and retried at tighter tolerance.
 */
CellChain ibm_step(const CellChain& c, double dtau, const IntegratorSettings& integ);

/** One density sample per gap, attributed to population A for gaps 1..m. */
std::vector<DensitySample> chain_densities(const CellChain& c);

/**
 * Chain plus persistent per-gap division clocks (gap j = 2..m-1 in 1-based
 * indices; clocks[k] tracks the gap between r[k] and r[k+1]).
 */
struct IbmState {
    CellChain chain;
    std::vector<double> clocks;  ///< size max(m-2, 0), all in [0, 1)
};

/** Wraps a validated chain with zeroed division clocks. */
IbmState make_ibm_state(CellChain c);

/**
 * Production macro step: relaxes mechanics over dtau, accrues each tracked
 * gap's clock by g(gap) * dtau, and processes division events.  A clock
 * crossing 1 inserts a copy of the gap's left cell (offset +1e-6 * d_eq),
 * increments m, and hands each daughter gap half the remainder; the
 * population-B block only shifts index.
 *
 * @throws StepTooLarge if a clock would cross 2 (two divisions of one gap
 *         in a single step; shrink dtau).
 */
void ibm_advance(IbmState& st, double dtau, const IntegratorSettings& integ);

} // namespace cellfront

#endif // CELLFRONT_IBM_HPP
