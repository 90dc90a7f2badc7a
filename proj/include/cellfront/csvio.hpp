/**
 * @file csvio.hpp
 * @brief CSV emission and parsing for snapshots, boundaries, comparison
 *        reports, and the contact-law tables.
 *
 * All values are written with 17 significant digits, so a written double
 * re-parses to the identical bit pattern.  Output is SI by default; the
 * nondimensional mode divides positions by the equilibrium gap and
 * densities by the equilibrium density (times are never scaled).
 *
 * Exact headers:
 *   snapshots   t,x,rho,pop
 *   boundaries  t,s1,s2
 *   report      t,linf_rel,l2_rel,gap_s1,gap_s2,jump,transmission_residual
 *   law tables  d,F  /  rho,D  /  rho,P
 */
#ifndef CELLFRONT_CSVIO_HPP
#define CELLFRONT_CSVIO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "cellfront/compare.hpp"
#include "cellfront/fbp.hpp"
#include "cellfront/ibm.hpp"

namespace cellfront {

/** Output scaling: positions divide by x_div, densities by rho_div. */
struct CsvUnits {
    double x_div = 1.0;
    double rho_div = 1.0;
};

/** Nondimensional output: x in equilibrium gaps, rho in equilibrium units. */
inline CsvUnits nondimensional_units(const SimConfig& cfg) {
    return CsvUnits{cfg.d_eq(), cfg.rho_eq()};
}

/** Writes the snapshot header row "t,x,rho,pop". */
void write_snapshot_header(std::ostream& os);

/** Appends one row per density sample: t,x,rho,pop. */
void append_samples(std::ostream& os, double t,
                    const std::vector<DensitySample>& samples,
                    const CsvUnits& units = {});

/** Appends one row per gap of a particle chain (gaps 1..m are A). */
void append_chain_snapshot(std::ostream& os, double t, const CellChain& chain,
                           const CsvUnits& units = {});

/** Appends one row per grid node of a continuum state (time from st.t). */
void append_fbp_snapshot(std::ostream& os, const FbpState& st,
                         const CsvUnits& units = {});

/** Writes the boundary header row "t,s1,s2". */
void write_boundary_header(std::ostream& os);

/** Appends one boundary row. */
void append_boundary(std::ostream& os, double t, double s1, double s2,
                     const CsvUnits& units = {});

/** Writes the comparison-report header row. */
void write_report_header(std::ostream& os);

/** Appends one comparison row (gaps scale as positions, jumps as densities). */
void append_report_row(std::ostream& os, const ComparisonRow& row,
                       const CsvUnits& units = {});

/** Contact-force table: n rows "d,F" on the inclusive range [d_lo, d_hi]. */
void write_force_table(std::ostream& os, const ForceLaw& law, double d_lo,
                       double d_hi, int n);

/** Diffusivity table: n rows "rho,D" on the inclusive range [r_lo, r_hi]. */
void write_diffusion_table(std::ostream& os, const ForceLaw& law, double r_lo,
                           double r_hi, int n);

/** Pressure table: n rows "rho,P" on the inclusive range [r_lo, r_hi]. */
void write_pressure_table(std::ostream& os, const ForceLaw& law, double r_lo,
                          double r_hi, int n);

/** One parsed snapshot row. */
struct SnapshotRow {
    double t = 0.0;
    double x = 0.0;
    double rho = 0.0;
    Population pop = Population::A;
};

/**
 * Parses snapshot CSV text (header plus rows) back into samples.
 * @throws IoError on a wrong header, malformed row, or unknown population.
 */
std::vector<SnapshotRow> parse_snapshot_csv(const std::string& text);

} // namespace cellfront

#endif // CELLFRONT_CSVIO_HPP
