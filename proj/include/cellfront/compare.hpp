/**
 * @file compare.hpp
 * @brief Cross-model experiment drivers: the particle-chain run loop and the
 *        particle-vs-continuum comparison report.
 *
 * The comparison runs both models from matched initial data — the continuum
 * initial densities are set to the piecewise-constant density implied by the
 * particle spacing, and the auto-resolved domain boundaries tile the chain
 * footprint — so any late-time mismatch measures the models, not the setup.
 */
#ifndef CELLFRONT_COMPARE_HPP
#define CELLFRONT_COMPARE_HPP

#include <vector>

#include "cellfront/config.hpp"
#include "cellfront/fbp.hpp"
#include "cellfront/ibm.hpp"

namespace cellfront {

/** Snapshot series of a particle-chain run at the configured cadence. */
struct IbmSeries {
    std::vector<double> t;  ///< snapshot times (s), t[k] = k * interval
    std::vector<std::vector<DensitySample>> samples;  ///< per-gap densities
    std::vector<double> s1;  ///< interface position r_m (m)
    std::vector<double> s2;  ///< leading edge r_n (m)
};

/**
 * Runs the particle chain from the configured initial lattice (n_A + n_B
 * cells spaced uniformly from s0) and records the per-gap density samples
 * and front positions at every snapshot interval up to T.  The spring
 * dynamics relax on a ~1e6 s timescale, far below the snapshot cadence, so
 * each macro step is stiff; the chain relaxation uses the configured
 * integrator scheme (implicit by default).
 *
 * @throws ConfigError   on invalid configuration.
 * @throws StepTooLarge  if the snapshot interval lets one gap divide twice
 *                       in a single macro step (shrink the interval).
 */
IbmSeries ibm_run(const SimConfig& cfg);

/** One comparison time sample; mirrors the report CSV schema. */
struct ComparisonRow {
    double t = 0.0;         ///< snapshot time (s)
    double linf_rel = 0.0;  ///< max relative density mismatch on the overlap
    double l2_rel = 0.0;    ///< root-sum-square relative density mismatch
    double gap_s1 = 0.0;    ///< particle minus continuum interface (m)
    double gap_s2 = 0.0;    ///< particle minus continuum leading edge (m)
    double jump = 0.0;      ///< continuum jump rho_A(s1-) - rho_B(s1+) (1/m)
    double transmission_residual = 0.0;  ///< relative damped-force mismatch
};

/** Comparison result: per-snapshot rows plus late-window front speeds. */
struct ComparisonReport {
    std::vector<ComparisonRow> rows;  ///< one per shared snapshot time
    FrontSpeeds ibm_speeds;  ///< front fit on the particle series, late half
    FrontSpeeds fbp_speeds;  ///< front fit on the continuum run, late half
};

/**
 * Computes the comparison metrics between an already-recorded particle
 * series and continuum trajectory sharing a snapshot cadence.  Continuum
 * node densities are linearly interpolated to the particle sample abscissae
 * within each population's own domain; samples outside it are skipped.
 * Front speeds are fitted over the late half of the shared time range.
 *
 * @throws ConfigError          if the snapshot time stamps disagree.
 * @throws InsufficientOverlap  if fewer than 4 samples of either population
 *                              land inside its continuum domain at some time.
 * @throws InsufficientData     if the late half holds fewer than 10
 *                              snapshots (front-speed fit requirement).
 */
ComparisonReport compare_series(const IbmSeries& ser,
                                const FbpTrajectory& traj,
                                const SimConfig& cfg);

/**
 * Full matched comparison: overrides the continuum initial densities with
 * the density implied by the particle spacing, runs both models, and
 * compares.  Optional out-parameters expose the raw runs (and the
 * continuum per-step diagnostics) for emission.
 */
ComparisonReport compare_models(const SimConfig& cfg,
                                FbpDiagnostics* diag = nullptr,
                                FbpTrajectory* fbp_out = nullptr,
                                IbmSeries* ibm_out = nullptr);

} // namespace cellfront

#endif // CELLFRONT_COMPARE_HPP
