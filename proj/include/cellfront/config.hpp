#pragma once
// Simulation configuration: one flat INI-style file drives every subcommand.
//
// The file is organised in sections mirroring the SimConfig fields below.
// Parsing is strict: unknown sections, unknown keys, duplicate keys, and
// malformed values are all reported with line numbers.  Every field has a
// default corresponding to the reference parameter set, so a config file
// only needs the overrides.
//
// Length-like defaults marked "auto" (ibm.spacing, domain.s1_init/s2_init)
// use a sentinel: any value not above its lower bound (0 for spacing, s0 for
// the interfaces) means "derive from the particle block": spacing defaults to
// d_eq/1.2 (20% compression), s1_init to s0 + n_A*spacing and s2_init to
// s1_init + n_B*spacing, so the continuum initial domains match the particle
// chain footprint.

#include "cellfront/errors.hpp"
#include "cellfront/mechanics.hpp"
#include "cellfront/odeint.hpp"

#include <string>

namespace cellfront {

struct SimConfig {
    // [jkr]
    JkrParams jkr{7.5e-6, 300.0, 0.4, 4.11433402e-6};

    // [model]
    double eta_A = 0.5e-2;  // kg/s
    double eta_B = 0.5e-2;  // kg/s
    long seed = 0;          // reserved: parsed and ignored (model deterministic)

    // [growth]
    double alpha = 2e-11;                  // peak division rate (1/s)
    double rho_M_over_rho_eq = 4.0 / 3.0;  // inhibition midpoint / rho_eq
    double eps_frac = 0.01;                // ramp half-scale as fraction of rho_M

    // [domain]
    double s0 = 0.0;       // fixed left end (m)
    double s1_init = 0.0;  // interface position; auto if <= s0
    double s2_init = 0.0;  // right boundary; auto if <= s1

    // [ibm]
    int n_A = 500;         // initial population-A cell count
    int n_B = 100;         // initial population-B cell count
    double spacing = 0.0;  // initial gap (m); auto (d_eq/1.2) if <= 0

    // [fbp]
    int N_A = 384;  // grid cells on [s0, s1]
    int N_B = 96;   // grid cells on [s1, s2]
    double rho_A_init_over_rho_eq = 1.2;
    double rho_B_init_over_rho_eq = 1.2;

    // [twave]
    double M = 100.0;         // conserved population-B mass (cell count)
    double z_min = -5e-2;     // left end of the shooting window (m)
    double shot_rtol = 1e-10; // profile integration tolerance
    double wave_tol = 1e-3;   // relative bisection tolerance on the speed

    // [integrator]
    IntegratorSettings integrator = default_integrator();

    // [schedule]
    double T = 5e11;                  // final time (s)
    double snapshot_interval = 1e10;  // output cadence (s)

    // Throws ConfigError on any violated invariant.
    void validate() const;

    // Derived quantities (computed from the JKR block).
    double d_eq() const { return jkr_coefficients(jkr).d_eq; }
    double rho_eq() const { return 1.0 / d_eq(); }
    GrowthLaw growth_law() const;
    ForceLaw force_law_A() const { return make_force_law(jkr, eta_A); }
    ForceLaw force_law_B() const { return make_force_law(jkr, eta_B); }

    // Sentinel resolution (see header comment).
    double ibm_spacing() const;
    double s1_resolved() const;
    double s2_resolved() const;

  private:
    static IntegratorSettings default_integrator() {
        IntegratorSettings s;
        s.rtol = 1e-8;
        s.atol = 1e-10;
        s.stiff = true;  // continuum runs default to the stiff path
        return s;
    }
};

// Parses config text.  Throws ConfigError with a line diagnostic on any
// syntax error, unknown section/key, duplicate key, or malformed value.
// The result is validated before being returned.
SimConfig parse_config(const std::string& text);

// Reads and parses a config file.  Throws IoError if unreadable.
SimConfig load_config(const std::string& path);

// Canonical serialization: every section and key, doubles at full precision
// (round-trips exactly), fixed ordering.  parse(serialize(c)) == c.
std::string serialize_config(const SimConfig& cfg);

} // namespace cellfront
