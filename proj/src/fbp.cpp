#include "cellfront/fbp.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace cellfront {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative-width termination for bracketing solves, with an absolute anchor.
struct ScaledTol {
    double rel;
    double anchor;
    bool operator()(double a, double b) const {
        return std::fabs(b - a) <=
               rel * (anchor + std::max(std::fabs(a), std::fabs(b)));
    }
};

// One-sided 3-point force-gradient stencils at the interface.  The A side
// approaches from the left (nodes at distances h and 2h below the boundary),
// the B side from the right; both return the gradient of F(1/rho) at the
// boundary with second-order accuracy.
double grad_from_left(double F0, double F1, double F2, double h) {
    return (3.0 * F0 - 4.0 * F1 + F2) / (2.0 * h);
}
double grad_from_right(double F0, double F1, double F2, double h) {
    return (-3.0 * F0 + 4.0 * F1 - F2) / (2.0 * h);
}

// One ulp of gap moves the contact force by about |F'(d_eq)| * eps * d_eq.
// Forces at that scale are rounding noise: they arise from densities a few
// ulps above equilibrium (e.g. after the scaled-density round trip u = u~/L)
// and carry no physical information, so the boundary solves treat anything
// within a small multiple of this quantum as force-free.
double force_quantum(const ForceLaw& law) {
    return std::numeric_limits<double>::epsilon() *
           std::fabs(law.coeffs.a1) * law.coeffs.d_eq;
}

// Packed layout for the integrator: [uA~ (N_A+1), uB~ (N_B+1), s1, s2],
// where u~ = L*u are the length-scaled node densities.
struct Layout {
    int NA;
    int NB;
    int iB0() const { return NA + 1; }
    int iS1() const { return NA + NB + 2; }
    int iS2() const { return NA + NB + 3; }
    int size() const { return NA + NB + 4; }
};

Eigen::VectorXd pack(const FbpState& st) {
    const Layout lay{st.N_A(), st.N_B()};
    Eigen::VectorXd y(lay.size());
    y.segment(0, lay.NA + 1) = st.uA * (st.s1 - st.s0);
    y.segment(lay.iB0(), lay.NB + 1) = st.uB * (st.s2 - st.s1);
    y[lay.iS1()] = st.s1;
    y[lay.iS2()] = st.s2;
    return y;
}

FbpState unpack(const Eigen::VectorXd& y, const Layout& lay, double s0,
                double t) {
    FbpState st;
    st.t = t;
    st.s0 = s0;
    st.s1 = y[lay.iS1()];
    st.s2 = y[lay.iS2()];
    st.uA = y.segment(0, lay.NA + 1) / (st.s1 - s0);
    st.uB = y.segment(lay.iB0(), lay.NB + 1) / (st.s2 - st.s1);
    return st;
}

// Semi-discrete right-hand side in the packed layout.  In robust mode any
// state the scheme cannot evaluate (collapsed domain, wild trial densities,
// failed boundary closure) yields NaN derivatives so the adaptive integrator
// rejects the step; in strict mode those conditions throw, which is what the
// public fbp_rhs contract wants.
InterfaceState core_rhs(const Layout& lay, double s0, const Eigen::VectorXd& y,
                        Eigen::VectorXd& dy, const FbpScheme& sch,
                        bool robust) {
    const InterfaceState none{kNaN, kNaN, kNaN, kNaN};
    const auto bail = [&](const char* what) -> InterfaceState {
        if (robust) {
            dy.setConstant(kNaN);
            return none;
        }
        throw DomainCollapse(what);
    };

    const double s1 = y[lay.iS1()];
    const double s2 = y[lay.iS2()];
    const double LA = s1 - s0;
    const double LB = s2 - s1;
    if (!(LA > 0.0) || !(LB > 0.0))
        return bail("continuum domain has nonpositive length");
    if (sch.hA_floor > 0.0 && LA < 4.0 * sch.hA_floor)
        return bail("population-A domain shrank below four initial grid cells");
    if (sch.hB_floor > 0.0 && LB < 4.0 * sch.hB_floor)
        return bail("population-B domain shrank below four initial grid cells");

    const int NA = lay.NA;
    const int NB = lay.NB;
    const Eigen::VectorXd uA = y.segment(0, NA + 1) / LA;
    const Eigen::VectorXd uB = y.segment(lay.iB0(), NB + 1) / LB;
    const double hxA = LA / NA;  // physical spacings
    const double hxB = LB / NB;

    // Boundary closures.  Trial states produced by an adaptive integrator can
    // carry arbitrarily unphysical stencil values; in robust mode those get
    // NaN derivatives (step rejection) rather than a hard failure.
    const double rho_lo =
        1e-6 * std::min(sch.law_A.rho_eq, sch.law_B.rho_eq);
    const double rho_hi = 1e6 * std::max(sch.law_A.rho_eq, sch.law_B.rho_eq);
    const auto physical = [&](double u) {
        return std::isfinite(u) && u > rho_lo && u < rho_hi;
    };
    if (robust && !(physical(uA[NA - 1]) && physical(uA[NA - 2]) &&
                    physical(uB[1]) && physical(uB[2]) &&
                    physical(uB[NB - 1]) && physical(uB[NB - 2]))) {
        dy.setConstant(kNaN);
        return none;
    }

    InterfaceState iface;
    double ds1;
    double ds2;
    if (robust) {
        try {
            iface = solve_interface(uA[NA - 1], uA[NA - 2], hxA, uB[1], uB[2],
                                    hxB, sch.law_A, sch.law_B,
                                    sch.interface_tol);
            iface.rhoB_end =
                robin_end_density(uB[NB - 1], uB[NB - 2], hxB, sch.law_B);
        } catch (const InterfaceFailure&) {
            dy.setConstant(kNaN);
            return none;
        }
    } else {
        iface = solve_interface(uA[NA - 1], uA[NA - 2], hxA, uB[1], uB[2], hxB,
                                sch.law_A, sch.law_B, sch.interface_tol);
        iface.rhoB_end =
            robin_end_density(uB[NB - 1], uB[NB - 2], hxB, sch.law_B);
    }
    ds1 = -iface.flux_if;
    ds2 = (2.0 / sch.law_B.eta) * sch.law_B.force_at_density(iface.rhoB_end);

    // Conservative update of the scaled densities.  Face flux relative to the
    // moving mesh:  Psi = -(D/L) du/dq - v_face * u_face, with q the unit-grid
    // coordinate and v the mesh velocity; all physical boundary fluxes are
    // identically zero, so only interior faces contribute.
    const double qA = 1.0 / NA;
    double psi_prev = 0.0;  // boundary face at q = 0
    for (int j = 0; j < NA; ++j) {
        const double ubar = 0.5 * (uA[j] + uA[j + 1]);
        const double D = std::max(diffusion_coeff(ubar, sch.law_A), 0.0);
        const double v = (j + 0.5) * qA * ds1;
        const double psi =
            -(D / LA) * (uA[j + 1] - uA[j]) / qA - v * ubar;
        if (j == 0)
            dy[0] = -2.0 * psi / qA;
        else
            dy[j] = -(psi - psi_prev) / qA;
        psi_prev = psi;
    }
    dy[NA] = 2.0 * psi_prev / qA;
    for (int j = 0; j <= NA; ++j)
        dy[j] += LA * growth_rate(uA[j], sch.growth) * uA[j];

    const double qB = 1.0 / NB;
    psi_prev = 0.0;
    for (int j = 0; j < NB; ++j) {
        const double ubar = 0.5 * (uB[j] + uB[j + 1]);
        const double D = std::max(diffusion_coeff(ubar, sch.law_B), 0.0);
        const double v = ds1 + (j + 0.5) * qB * (ds2 - ds1);
        const double psi =
            -(D / LB) * (uB[j + 1] - uB[j]) / qB - v * ubar;
        const int row = lay.iB0() + j;
        if (j == 0)
            dy[row] = -2.0 * psi / qB;
        else
            dy[row] = -(psi - psi_prev) / qB;
        psi_prev = psi;
    }
    dy[lay.iB0() + NB] = 2.0 * psi_prev / qB;

    dy[lay.iS1()] = ds1;
    dy[lay.iS2()] = ds2;
    return iface;
}

} // namespace

void FbpState::validate() const {
    if (N_A() < 4 || N_B() < 4)
        throw ConfigError("continuum state needs at least 5 nodes per domain");
    if (!(s0 < s1 && s1 < s2))
        throw DomainCollapse("continuum state must satisfy s0 < s1 < s2");
    if (!std::isfinite(t) || !std::isfinite(s0) || !std::isfinite(s2))
        throw ConfigError("continuum state has nonfinite scalars");
    for (int j = 0; j <= N_A(); ++j)
        if (!std::isfinite(uA[j]) || !(uA[j] > 0.0))
            throw ConfigError("population-A densities must be positive finite");
    for (int j = 0; j <= N_B(); ++j)
        if (!std::isfinite(uB[j]) || !(uB[j] > 0.0))
            throw ConfigError("population-B densities must be positive finite");
}

InterfaceState solve_interface(double uA1, double uA2, double hA, double uB1,
                               double uB2, double hB, const ForceLaw& law_A,
                               const ForceLaw& law_B, double tol) {
    const double FA1 = law_A.force_at_density(uA1);
    const double FA2 = law_A.force_at_density(uA2);
    const double FB1 = law_B.force_at_density(uB1);
    const double FB2 = law_B.force_at_density(uB2);
    const double qA = force_quantum(law_A);
    const double qB = force_quantum(law_B);
    if (std::max(std::fabs(FA1), std::fabs(FA2)) <= 64.0 * qA &&
        std::max(std::fabs(FB1), std::fabs(FB2)) <= 64.0 * qB)
        return InterfaceState{law_A.rho_eq, law_B.rho_eq, 0.0, 0.0};

    const double etaA = law_A.eta;
    const double etaB = law_B.eta;
    const double xlo = law_A.rho_eq * (1.0 + 1e-12);
    const double ylo = law_B.rho_eq * (1.0 + 1e-12);
    const double xhi = 1e9 * law_A.rho_eq;
    const double yhi = 1e9 * law_B.rho_eq;

    // Residuals: force balance and equality of the one-sided transport
    // velocities built from force-value stencils.  Each residual carries a
    // relative scale (sum of its constituent term magnitudes) and a rounding
    // floor (what cancellation noise plus the force quantum make achievable);
    // convergence means falling under tol times the scale or under the floor.
    const double eps = std::numeric_limits<double>::epsilon();
    struct Residuals {
        double R1, R2, SA, SB, sc1, sc2, fl1, fl2;
    };
    const auto eval = [&](double x, double y) {
        Residuals r;
        const double FAx = law_A.force_at_density(x);
        const double FBy = law_B.force_at_density(y);
        r.SA = grad_from_left(FAx, FA1, FA2, hA);
        r.SB = grad_from_right(FBy, FB1, FB2, hB);
        r.R1 = FAx / etaA - FBy / etaB;
        r.R2 = r.SA / (etaA * x) - r.SB / (etaB * y);
        const double mFA =
            std::max({std::fabs(FAx), std::fabs(FA1), std::fabs(FA2)});
        const double mFB =
            std::max({std::fabs(FBy), std::fabs(FB1), std::fabs(FB2)});
        r.sc1 = (std::fabs(FAx) + std::fabs(FA1)) / etaA +
                (std::fabs(FBy) + std::fabs(FB1)) / etaB + 1e-300;
        r.sc2 = (3.0 * std::fabs(FAx) + 4.0 * std::fabs(FA1) + std::fabs(FA2)) /
                    (2.0 * hA * etaA * x) +
                (3.0 * std::fabs(FBy) + 4.0 * std::fabs(FB1) + std::fabs(FB2)) /
                    (2.0 * hB * etaB * y) +
                1e-300;
        r.fl1 = 64.0 * ((qA + eps * mFA) / etaA + (qB + eps * mFB) / etaB);
        r.fl2 = 256.0 * ((qA + eps * mFA) / (2.0 * hA * etaA * x) +
                         (qB + eps * mFB) / (2.0 * hB * etaB * y));
        return r;
    };
    const auto converged = [&](const Residuals& r) {
        return std::fabs(r.R1) <= std::max(tol * r.sc1, r.fl1) &&
               std::fabs(r.R2) <= std::max(tol * r.sc2, r.fl2);
    };

    double x = std::clamp(uA1, xlo, xhi);
    double y = std::clamp(uB1, ylo, yhi);
    Residuals cur = eval(x, y);

    for (int it = 0; it < 60; ++it) {
        if (converged(cur)) {
            const double flux = cur.SA / (etaA * x);
            return InterfaceState{x, y, flux, 0.0};
        }
        const double DA = diffusion_coeff(x, law_A);
        const double DB = diffusion_coeff(y, law_B);
        const double J11 = DA;
        const double J12 = -DB;
        const double J21 =
            3.0 * DA / (2.0 * hA * x) - cur.SA / (etaA * x * x);
        const double J22 =
            3.0 * DB / (2.0 * hB * y) + cur.SB / (etaB * y * y);
        const double det = J11 * J22 - J12 * J21;
        if (!std::isfinite(det) || det == 0.0)
            throw InterfaceFailure(
                "interface reconstruction: singular Jacobian");
        const double dx = (-cur.R1 * J22 + cur.R2 * J12) / det;
        const double dyv = (cur.R1 * J21 - cur.R2 * J11) / det;

        const double phi_old =
            std::fabs(cur.R1) / cur.sc1 + std::fabs(cur.R2) / cur.sc2;
        double lambda = 1.0;
        bool moved = false;
        for (int damp = 0; damp < 10; ++damp) {
            const double xn = std::clamp(x + lambda * dx, xlo, xhi);
            const double yn = std::clamp(y + lambda * dyv, ylo, yhi);
            const Residuals trial = eval(xn, yn);
            const double phi_new =
                std::fabs(trial.R1) / trial.sc1 + std::fabs(trial.R2) / trial.sc2;
            if (std::isfinite(phi_new) &&
                (phi_new < phi_old || converged(trial))) {
                x = xn;
                y = yn;
                cur = trial;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!moved) {
            // Stalled with both updates pressing into the force-free region:
            // the stencils demand face tension, and the adhesion-free
            // contact law has no such branch (e.g. a compressed second-ring
            // node behind an exactly-relaxed face).  The consistent
            // continuum limit of such data is a force-free interface.
            if (x <= xlo * (1.0 + 1e-11) && y <= ylo * (1.0 + 1e-11) &&
                dx <= 0.0 && dyv <= 0.0)
                return InterfaceState{law_A.rho_eq, law_B.rho_eq, 0.0, 0.0};
            throw InterfaceFailure(
                "interface reconstruction: damped Newton stalled");
        }
    }
    throw InterfaceFailure(
        "interface reconstruction: Newton failed to reach tolerance");
}

double robin_end_density(double uN1, double uN2, double h,
                         const ForceLaw& law_B) {
    const double F1 = law_B.force_at_density(uN1);
    const double F2 = law_B.force_at_density(uN2);
    const double rho_eq = law_B.rho_eq;
    const double q = 64.0 * force_quantum(law_B);
    if (std::max(std::fabs(F1), std::fabs(F2)) <= q) return rho_eq;
    const auto R = [&](double u) {
        const double Fu = law_B.force_at_density(u);
        return grad_from_left(Fu, F1, F2, h) + 2.0 * u * Fu;
    };
    // R is monotone increasing above the equilibrium density; a nonnegative
    // residual there means the edge is force-free (stationary).
    if (R(rho_eq) >= 0.0) return rho_eq;

    double hi = 2.0 * std::max({uN1, uN2, rho_eq});
    while (R(hi) < 0.0) {
        hi *= 2.0;
        if (hi > 1e12 * rho_eq)
            throw InterfaceFailure("edge closure: no bracket for the density");
    }
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        R, rho_eq, hi, ScaledTol{1e-13, 0.0}, iters);
    if (iters >= 200)
        throw InterfaceFailure("edge closure: root solve did not converge");
    return 0.5 * (r.first + r.second);
}

FbpDerivs fbp_rhs(const FbpState& st, const FbpScheme& sch) {
    st.validate();
    const Layout lay{st.N_A(), st.N_B()};
    const Eigen::VectorXd y = pack(st);
    Eigen::VectorXd dy(lay.size());
    const InterfaceState iface = core_rhs(lay, st.s0, y, dy, sch, false);

    FbpDerivs out;
    out.ds1 = dy[lay.iS1()];
    out.ds2 = dy[lay.iS2()];
    out.iface = iface;
    const double LA = st.s1 - st.s0;
    const double LB = st.s2 - st.s1;
    out.duA = (dy.segment(0, lay.NA + 1) - out.ds1 * st.uA) / LA;
    out.duB = (dy.segment(lay.iB0(), lay.NB + 1) - (out.ds2 - out.ds1) * st.uB) / LB;
    return out;
}

FbpState fbp_initial_state(const SimConfig& cfg) {
    FbpState st;
    st.t = 0.0;
    st.s0 = cfg.s0;
    st.s1 = cfg.s1_resolved();
    st.s2 = cfg.s2_resolved();
    const double rho_eq = cfg.rho_eq();
    st.uA = Eigen::VectorXd::Constant(cfg.N_A + 1,
                                      cfg.rho_A_init_over_rho_eq * rho_eq);
    st.uB = Eigen::VectorXd::Constant(cfg.N_B + 1,
                                      cfg.rho_B_init_over_rho_eq * rho_eq);
    return st;
}

FbpTrajectory fbp_run(const SimConfig& cfg, FbpDiagnostics* diag) {
    cfg.validate();
    const FbpState st0 = fbp_initial_state(cfg);
    const Layout lay{st0.N_A(), st0.N_B()};

    FbpScheme sch;
    sch.law_A = cfg.force_law_A();
    sch.law_B = cfg.force_law_B();
    sch.growth = cfg.growth_law();
    sch.hA_floor = (st0.s1 - st0.s0) / cfg.N_A;
    sch.hB_floor = (st0.s2 - st0.s1) / cfg.N_B;

    // Density bounds enforced along the run: equilibrium from below, the
    // running caps from above (the growth plateau — the density where
    // proliferation shuts off — or the initial maximum for A; the
    // force-matched image of the A cap or the initial maximum for B).
    const double capA = std::max(sch.growth.rho_plateau(), st0.uA.maxCoeff());
    const double capB =
        std::max(density_from_force(sch.law_A.force_at_density(capA), sch.law_B),
                 st0.uB.maxCoeff());
    const double lo_A = sch.law_A.rho_eq * (1.0 - 1e-6);
    const double lo_B = sch.law_B.rho_eq * (1.0 - 1e-6);
    const double hi_A = capA * (1.0 + 1e-6);
    const double hi_B = capB * (1.0 + 1e-6);

    const double dt_snap = cfg.snapshot_interval;
    const long K = static_cast<long>(std::floor(cfg.T / dt_snap + 1e-9));

    FbpTrajectory traj;
    traj.snapshots.push_back(st0);
    long next_k = 1;

    Eigen::VectorXd y0 = pack(st0);
    double prev_t = 0.0;
    Eigen::VectorXd prev_y = y0;

    const auto rhs = [&](double, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        core_rhs(lay, cfg.s0, y, dy, sch, true);
    };
    const auto cb = [&](double t, const Eigen::VectorXd& y) {
        const double s1 = y[lay.iS1()];
        const double s2 = y[lay.iS2()];
        const double LA = s1 - cfg.s0;
        const double LB = s2 - s1;
        if (!(LA >= 4.0 * sch.hA_floor) || !(LB >= 4.0 * sch.hB_floor))
            throw DomainCollapse("a continuum domain shrank below four initial grid cells");
        const auto segA = y.segment(0, lay.NA + 1);
        const auto segB = y.segment(lay.iB0(), lay.NB + 1);
        const double minA = segA.minCoeff() / LA;
        const double maxA = segA.maxCoeff() / LA;
        const double minB = segB.minCoeff() / LB;
        const double maxB = segB.maxCoeff() / LB;
        if (minA < lo_A || maxA > hi_A || minB < lo_B || maxB > hi_B)
            throw ToleranceNotMet(fmt::format(
                "density bounds violated at t = {:g}: A in [{:g}, {:g}] "
                "(allowed [{:g}, {:g}]), B in [{:g}, {:g}] (allowed [{:g}, {:g}])",
                t, minA, maxA, lo_A, hi_A, minB, maxB, lo_B, hi_B));

        if (diag != nullptr) {
            const double uAe = y[lay.NA] / LA;
            const double uB0 = y[lay.iB0()] / LB;
            const double tA = sch.law_A.force_at_density(uAe) / sch.law_A.eta;
            const double tB = sch.law_B.force_at_density(uB0) / sch.law_B.eta;
            const double scale = std::max(std::fabs(tA), std::fabs(tB));
            diag->t.push_back(t);
            diag->jump.push_back(uAe - uB0);
            diag->residual.push_back(scale > 0.0 ? std::fabs(tA - tB) / scale
                                                 : 0.0);
            diag->s1.push_back(s1);
            diag->s2.push_back(s2);
        }

        while (next_k <= K && next_k * dt_snap <= t * (1.0 + 1e-14)) {
            const double ts = next_k * dt_snap;
            const double th = (t > prev_t) ? (ts - prev_t) / (t - prev_t) : 1.0;
            const Eigen::VectorXd ys = prev_y + th * (y - prev_y);
            traj.snapshots.push_back(unpack(ys, lay, cfg.s0, ts));
            ++next_k;
        }
        prev_t = t;
        prev_y = y;
        return true;
    };

    integrate(rhs, y0, 0.0, cfg.T, cfg.integrator, cb);
    // The integration ends exactly at T; mop up any snapshot the floating
    // guard left pending.
    while (next_k <= K) {
        traj.snapshots.push_back(unpack(prev_y, lay, cfg.s0, next_k * dt_snap));
        ++next_k;
    }
    return traj;
}

FrontSpeeds front_speed(const FbpTrajectory& traj, double t_lo, double t_hi) {
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> b;
    for (const FbpState& st : traj.snapshots) {
        if (st.t >= t_lo && st.t <= t_hi) {
            t.push_back(st.t);
            a.push_back(st.s1);
            b.push_back(st.s2);
        }
    }
    if (t.size() < 10)
        throw InsufficientData(fmt::format(
            "front-speed fit needs at least 10 snapshots in the window, got {}",
            t.size()));

    const auto fit = [&](const std::vector<double>& s, double& c,
                         double& resid_rel) {
        const size_t n = t.size();
        double tbar = 0.0;
        double sbar = 0.0;
        double smax = 0.0;
        for (size_t i = 0; i < n; ++i) {
            tbar += t[i];
            sbar += s[i];
            smax = std::max(smax, std::fabs(s[i]));
        }
        tbar /= static_cast<double>(n);
        sbar /= static_cast<double>(n);
        double num = 0.0;
        double den = 0.0;
        for (size_t i = 0; i < n; ++i) {
            num += (t[i] - tbar) * (s[i] - sbar);
            den += (t[i] - tbar) * (t[i] - tbar);
        }
        c = num / den;
        double ss = 0.0;
        for (size_t i = 0; i < n; ++i) {
            const double r = s[i] - sbar - c * (t[i] - tbar);
            ss += r * r;
        }
        const double rms = std::sqrt(ss / static_cast<double>(n));
        // Residuals at the rounding noise of the positions themselves count
        // as a perfect fit (a constant series has rms ~ one ulp of its mean).
        if (rms <= 32.0 * std::numeric_limits<double>::epsilon() * smax) {
            resid_rel = 0.0;
            return;
        }
        const double disp = std::fabs(s.back() - s.front());
        resid_rel = rms / std::max(disp, 1e-300);
    };

    FrontSpeeds out;
    fit(a, out.c1, out.resid1_rel);
    fit(b, out.c2, out.resid2_rel);
    return out;
}

double trapezoid_mass_A(const FbpState& st) {
    const double hx = (st.s1 - st.s0) / st.N_A();
    double acc = 0.5 * (st.uA[0] + st.uA[st.N_A()]);
    for (int j = 1; j < st.N_A(); ++j) acc += st.uA[j];
    return hx * acc;
}

double trapezoid_mass_B(const FbpState& st) {
    const double hx = (st.s2 - st.s1) / st.N_B();
    double acc = 0.5 * (st.uB[0] + st.uB[st.N_B()]);
    for (int j = 1; j < st.N_B(); ++j) acc += st.uB[j];
    return hx * acc;
}

NodeTraces interface_node_traces(const FbpState& st, const FbpScheme& sch) {
    NodeTraces nt;
    nt.rhoA_left = st.uA[st.N_A()];
    nt.rhoB_right = st.uB[0];
    nt.jump = nt.rhoA_left - nt.rhoB_right;
    const double tA = sch.law_A.force_at_density(nt.rhoA_left) / sch.law_A.eta;
    const double tB = sch.law_B.force_at_density(nt.rhoB_right) / sch.law_B.eta;
    const double scale = std::max(std::fabs(tA), std::fabs(tB));
    nt.residual_rel = scale > 0.0 ? std::fabs(tA - tB) / scale : 0.0;
    return nt;
}

} // namespace cellfront
